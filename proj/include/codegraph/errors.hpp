#pragma once

#include <stdexcept>
#include <string>

namespace codegraph {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// scene
class LayoutInfeasible : public Error { public: using Error::Error; };
class UnknownObject : public Error { public: using Error::Error; };
class UnknownTask : public Error { public: using Error::Error; };

// graph
class NoAnchors : public Error { public: using Error::Error; };

// prompting
class UnknownNode : public Error { public: using Error::Error; };
class UnresolvedHole : public Error { public: using Error::Error; };

// executor
class UnknownVerbPattern : public Error { public: using Error::Error; };
class TargetInvisible : public Error { public: using Error::Error; };

// harness
class ConfigError : public Error { public: using Error::Error; };
class VersionMismatch : public Error { public: using Error::Error; };

}  // namespace codegraph
