#include <algorithm>
#include <set>
#include <sstream>

#include "codegraph/planner.hpp"

namespace codegraph {

namespace {

std::string describe(const std::string& message, SourcePos pos, const std::vector<std::string>& expected) {
    std::ostringstream os;
    os << "line " << pos.line << ", column " << pos.col << ": " << message;
    if (!expected.empty()) {
        os << " (expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) os << (i ? " or " : "") << expected[i];
        os << ")";
    }
    return os.str();
}

}  // namespace

PlanSyntaxError::PlanSyntaxError(const std::string& message, SourcePos p, std::vector<std::string> exp)
    : Error(describe(message, p, exp)), pos(p), expected(std::move(exp)), detail(message) {}

std::vector<std::pair<const Step*, std::string>> PlannerProgram::all_steps() const {
    std::vector<std::pair<const Step*, std::string>> out;
    auto walk = [&](const std::vector<PlanItem>& items, auto&& self) -> void {
        for (const auto& it : items) {
            switch (it.kind) {
                case PlanItem::Kind::step: out.emplace_back(&it.step, ""); break;
                case PlanItem::Kind::branch:
                    self(it.then_items, self);
                    self(it.else_items, self);
                    break;
                case PlanItem::Kind::for_each:
                    for (const auto& s : it.body) out.emplace_back(&s, it.var);
                    break;
            }
        }
    };
    walk(plan, walk);
    return out;
}

namespace {

// ---- reader ----------------------------------------------------------------

struct Sexp {
    enum class Type { list, symbol, string, keyword };
    Type type = Type::list;
    std::string text;
    std::vector<Sexp> items;
    SourcePos pos;
    SourcePos end;  // closing paren of a list

    bool is_list() const { return type == Type::list; }
    bool is_symbol() const { return type == Type::symbol; }
    bool is_string() const { return type == Type::string; }
    std::string head() const { return is_list() && !items.empty() && items[0].is_symbol() ? items[0].text : ""; }
};

class Reader {
public:
    explicit Reader(const std::string& text) : s_(text) {}

    Sexp read_top() {
        skip();
        if (i_ >= s_.size()) throw ParseError("empty program", pos_, {"(policy"});
        Sexp e = read();
        skip();
        if (i_ < s_.size()) throw ParseError("unexpected text after program", pos_, {"end of input"});
        return e;
    }

private:
    // Continuation bytes do not start a new column.
    void advance() {
        const unsigned char c = static_cast<unsigned char>(s_[i_++]);
        if (c == '\n') {
            ++pos_.line;
            pos_.col = 1;
        } else if ((c & 0xC0) != 0x80) {
            ++pos_.col;
        }
    }

    void skip() {
        while (i_ < s_.size()) {
            const char c = s_[i_];
            if (c == ';') {
                while (i_ < s_.size() && s_[i_] != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else {
                break;
            }
        }
    }

    static bool delimiter(char c) {
        return c == '(' || c == ')' || c == '"' || c == ';' || c == ' ' || c == '\t' || c == '\r' || c == '\n';
    }

    Sexp read() {
        skip();
        if (i_ >= s_.size()) throw ParseError("unexpected end of input", pos_, {"')'"});
        Sexp e;
        e.pos = pos_;
        const char c = s_[i_];
        if (c == '(') {
            advance();
            e.type = Sexp::Type::list;
            for (;;) {
                skip();
                if (i_ >= s_.size()) throw ParseError("unclosed '('", e.pos, {"')'"});
                if (s_[i_] == ')') {
                    e.end = pos_;
                    advance();
                    return e;
                }
                e.items.push_back(read());
            }
        }
        if (c == ')') throw ParseError("unexpected ')'", pos_, {"an expression"});
        if (c == '"') {
            advance();
            e.type = Sexp::Type::string;
            for (;;) {
                if (i_ >= s_.size() || s_[i_] == '\n') throw ParseError("unterminated string", e.pos, {"'\"'"});
                char ch = s_[i_];
                if (ch == '"') {
                    advance();
                    return e;
                }
                if (ch == '\\') {
                    advance();
                    if (i_ >= s_.size()) throw ParseError("unterminated string", e.pos, {"'\"'"});
                    ch = s_[i_];
                    if (ch == 'n') ch = '\n';
                    else if (ch != '"' && ch != '\\') throw ParseError("unknown escape", pos_, {"\\\"", "\\\\", "\\n"});
                }
                e.text += ch;
                advance();
            }
        }
        while (i_ < s_.size() && !delimiter(s_[i_])) {
            e.text += s_[i_];
            advance();
        }
        e.type = e.text[0] == ':' ? Sexp::Type::keyword : Sexp::Type::symbol;
        return e;
    }

    const std::string& s_;
    std::size_t i_ = 0;
    SourcePos pos_;
};

// ---- forms -----------------------------------------------------------------

const Sexp& expect_list(const Sexp& e, const std::string& what) {
    if (!e.is_list()) throw ParseError("expected " + what, e.pos, {"(" + what});
    if (e.items.empty() || !e.items[0].is_symbol()) throw ParseError("expected a form name", e.pos, {what});
    return e;
}

std::string expect_symbol(const Sexp& e, const std::string& what) {
    if (!e.is_symbol()) throw ParseError("expected " + what, e.pos, {what});
    return e.text;
}

std::string expect_string(const Sexp& e, const std::string& what) {
    if (!e.is_string()) throw ParseError("expected " + what, e.pos, {"a string"});
    return e.text;
}

void arity(const Sexp& e, std::size_t args) {
    if (e.items.size() - 1 != args)
        throw ArityError("(" + e.head() + ") takes " + std::to_string(args) + " argument" + (args == 1 ? "" : "s") +
                             ", got " + std::to_string(e.items.size() - 1),
                         e.pos);
}

void min_arity(const Sexp& e, std::size_t args) {
    if (e.items.size() - 1 < args)
        throw ArityError("(" + e.head() + ") takes at least " + std::to_string(args) + " argument" +
                             (args == 1 ? "" : "s") + ", got " + std::to_string(e.items.size() - 1),
                         e.pos);
}

QueryExpr parse_query(const Sexp& e) {
    expect_list(e, "query");
    QueryExpr q;
    q.pos = e.pos;
    const std::string h = e.head();
    if (h == "objects") {
        q.kind = QueryExpr::Kind::objects;
        if ((e.items.size() - 1) % 2 != 0) throw ArityError("(objects) takes keyword/value pairs", e.pos);
        for (std::size_t i = 1; i < e.items.size(); i += 2) {
            const Sexp& k = e.items[i];
            const Sexp& v = e.items[i + 1];
            if (k.type != Sexp::Type::keyword || k.text.size() < 2)
                throw ParseError("expected a keyword", k.pos, {":class", ":in", ":on", ":<attribute>"});
            const std::string key = k.text.substr(1);
            if (key == "in") {
                q.in_var = expect_symbol(v, "a variable");
            } else if (key == "on") {
                q.on_var = expect_symbol(v, "a variable");
            } else if (key == "class") {
                q.class_name = expect_string(v, "a class name");
            } else {
                q.attributes[key] = expect_string(v, "an attribute value");
            }
        }
    } else if (h == "first") {
        q.kind = QueryExpr::Kind::first;
        arity(e, 1);
        q.sub.push_back(parse_query(e.items[1]));
    } else if (h == "container-of") {
        q.kind = QueryExpr::Kind::container_of;
        arity(e, 1);
        q.var = expect_symbol(e.items[1], "a variable");
    } else if (h == "empty-containers") {
        q.kind = QueryExpr::Kind::empty_containers;
        arity(e, 1);
        q.container_class = expect_string(e.items[1], "a class name");
    } else if (h == "other") {
        q.kind = QueryExpr::Kind::other;
        arity(e, 2);
        q.sub.push_back(parse_query(e.items[1]));
        q.var = expect_symbol(e.items[2], "a variable");
    } else {
        throw UnknownForm("unknown query form '" + h + "'", e.items[0].pos,
                          {"objects", "first", "container-of", "empty-containers", "other"});
    }
    return q;
}

PredExpr parse_pred(const Sexp& e) {
    expect_list(e, "predicate");
    PredExpr p;
    p.pos = e.pos;
    const std::string h = e.head();
    auto vars = [&](std::size_t n) {
        arity(e, n);
        for (std::size_t i = 1; i <= n; ++i) p.args.push_back(expect_symbol(e.items[i], "a variable"));
    };
    if (h == "in") {
        p.kind = PredExpr::Kind::in;
        vars(2);
    } else if (h == "on") {
        p.kind = PredExpr::Kind::on;
        vars(2);
    } else if (h == "near") {
        p.kind = PredExpr::Kind::near;
        vars(2);
    } else if (h == "holding") {
        p.kind = PredExpr::Kind::holding;
        vars(1);
    } else if (h == "hand-empty") {
        p.kind = PredExpr::Kind::hand_empty;
        arity(e, 0);
    } else if (h == "done") {
        p.kind = PredExpr::Kind::done;
        arity(e, 1);
        p.args.push_back(expect_symbol(e.items[1], "a step id"));
    } else if (h == "and" || h == "or") {
        p.kind = h == "and" ? PredExpr::Kind::all : PredExpr::Kind::any;
        min_arity(e, 1);
        for (std::size_t i = 1; i < e.items.size(); ++i) p.sub.push_back(parse_pred(e.items[i]));
    } else if (h == "not") {
        p.kind = PredExpr::Kind::negate;
        arity(e, 1);
        p.sub.push_back(parse_pred(e.items[1]));
    } else if (h == "true") {
        p.kind = PredExpr::Kind::always;
        arity(e, 0);
    } else {
        throw UnknownForm("unknown predicate '" + h + "'", e.items[0].pos,
                          {"in", "on", "near", "holding", "hand-empty", "done", "and", "or", "not", "true"});
    }
    return p;
}

Action parse_action(const Sexp& e) {
    expect_list(e, "when");
    if (e.head() != "when") throw UnknownForm("unknown action form '" + e.head() + "'", e.items[0].pos, {"when"});
    arity(e, 3);
    Action a;
    a.guard = parse_pred(e.items[1]);
    const Sexp& say = expect_list(e.items[2], "say");
    if (say.head() != "say") throw ParseError("expected (say ...)", say.pos, {"(say"});
    arity(say, 1);
    a.instruction_template = expect_string(say.items[1], "an instruction template");
    a.say_pos = say.pos;
    const Sexp& focus = expect_list(e.items[3], "focus");
    if (focus.head() != "focus") throw ParseError("expected (focus ...)", focus.pos, {"(focus"});
    min_arity(focus, 1);
    a.focus_pos = focus.pos;
    for (std::size_t i = 1; i < focus.items.size(); ++i)
        a.relevant_vars.push_back(expect_symbol(focus.items[i], "a variable"));
    return a;
}

Step parse_step(const Sexp& e) {
    min_arity(e, 3);
    Step s;
    s.pos = e.pos;
    s.step_id = expect_symbol(e.items[1], "a step id");
    if (s.step_id.find_first_of(".,=@") != std::string::npos)
        throw ParseError("step id may not contain '.', ',', '=' or '@'", e.items[1].pos);
    const Sexp& goal = expect_list(e.items[2], "goal");
    if (goal.head() != "goal") throw ParseError("expected (goal ...)", goal.pos, {"(goal"});
    arity(goal, 1);
    s.goal = parse_pred(goal.items[1]);
    for (std::size_t i = 3; i < e.items.size(); ++i) s.actions.push_back(parse_action(e.items[i]));
    const Action& last = s.actions.back();
    if (last.guard.kind != PredExpr::Kind::always)
        throw ParseError("the last action of a step must be guarded by (true)", last.guard.pos, {"(true)"});
    return s;
}

std::vector<PlanItem> parse_items(const std::vector<Sexp>& items, std::size_t from);

PlanItem parse_item(const Sexp& e) {
    expect_list(e, "step");
    PlanItem it;
    const std::string h = e.head();
    if (h == "step") {
        it.kind = PlanItem::Kind::step;
        it.step = parse_step(e);
    } else if (h == "if") {
        it.kind = PlanItem::Kind::branch;
        arity(e, 3);
        it.condition = parse_pred(e.items[1]);
        for (int b = 2; b <= 3; ++b) {
            const Sexp& branch = e.items[b];
            if (!branch.is_list() || branch.items.empty())
                throw ParseError("expected a parenthesised list of steps", branch.pos, {"((step"});
            (b == 2 ? it.then_items : it.else_items) = parse_items(branch.items, 0);
        }
    } else if (h == "for-each") {
        it.kind = PlanItem::Kind::for_each;
        min_arity(e, 3);
        it.var = expect_symbol(e.items[1], "a variable");
        it.query = parse_query(e.items[2]);
        for (std::size_t i = 3; i < e.items.size(); ++i) {
            const Sexp& s = expect_list(e.items[i], "step");
            if (s.head() != "step") throw UnknownForm("for-each body takes steps only", s.items[0].pos, {"step"});
            it.body.push_back(parse_step(s));
        }
    } else {
        throw UnknownForm("unknown plan form '" + h + "'", e.items[0].pos, {"step", "if", "for-each"});
    }
    return it;
}

std::vector<PlanItem> parse_items(const std::vector<Sexp>& items, std::size_t from) {
    std::vector<PlanItem> out;
    for (std::size_t i = from; i < items.size(); ++i) out.push_back(parse_item(items[i]));
    return out;
}

// ---- static checks -----------------------------------------------------------

struct Checker {
    std::set<std::string> step_ids;
    std::set<std::string> loop_step_ids;

    static void need(const std::string& var, const std::set<std::string>& scope, SourcePos pos) {
        if (!scope.count(var)) throw ParseError("unbound variable '" + var + "'", pos, {"a bound variable"});
    }

    void query(const QueryExpr& q, const std::set<std::string>& scope) const {
        if (q.in_var) need(*q.in_var, scope, q.pos);
        if (q.on_var) need(*q.on_var, scope, q.pos);
        if (q.kind == QueryExpr::Kind::container_of || q.kind == QueryExpr::Kind::other) need(q.var, scope, q.pos);
        for (const auto& s : q.sub) query(s, scope);
    }

    void pred(const PredExpr& p, const std::set<std::string>& scope) const {
        if (p.kind == PredExpr::Kind::done) {
            const std::string& id = p.args[0];
            const auto dot = id.rfind('.');
            const bool expanded = dot != std::string::npos && loop_step_ids.count(id.substr(0, dot));
            if (!step_ids.count(id) && !expanded) throw ParseError("unknown step id '" + id + "'", p.pos);
        } else {
            for (const auto& a : p.args) need(a, scope, p.pos);
        }
        for (const auto& s : p.sub) pred(s, scope);
    }

    void step(const Step& s, const std::set<std::string>& scope) const {
        pred(s.goal, scope);
        for (const auto& a : s.actions) {
            pred(a.guard, scope);
            for (const auto& v : a.relevant_vars) need(v, scope, a.focus_pos);
            const std::string& t = a.instruction_template;
            for (std::size_t i = t.find('{'); i != std::string::npos; i = t.find('{', i + 1)) {
                const std::size_t close = t.find('}', i);
                if (close == std::string::npos) throw ParseError("unterminated hole in template", a.say_pos);
                need(t.substr(i + 1, close - i - 1), scope, a.say_pos);
            }
        }
    }

    void collect(const std::vector<PlanItem>& items) {
        for (const auto& it : items) {
            auto add = [&](const Step& s, bool loop) {
                if (!step_ids.insert(s.step_id).second) throw ParseError("duplicate step id '" + s.step_id + "'", s.pos);
                if (loop) loop_step_ids.insert(s.step_id);
            };
            if (it.kind == PlanItem::Kind::step) add(it.step, false);
            if (it.kind == PlanItem::Kind::branch) {
                collect(it.then_items);
                collect(it.else_items);
            }
            if (it.kind == PlanItem::Kind::for_each)
                for (const auto& s : it.body) add(s, true);
        }
    }

    void items(const std::vector<PlanItem>& list, const std::set<std::string>& scope) const {
        for (const auto& it : list) {
            switch (it.kind) {
                case PlanItem::Kind::step: step(it.step, scope); break;
                case PlanItem::Kind::branch:
                    pred(it.condition, scope);
                    items(it.then_items, scope);
                    items(it.else_items, scope);
                    break;
                case PlanItem::Kind::for_each: {
                    query(it.query, scope);
                    if (scope.count(it.var))
                        throw ParseError("loop variable '" + it.var + "' shadows a binding", it.query.pos);
                    std::set<std::string> inner = scope;
                    inner.insert(it.var);
                    for (const auto& s : it.body) step(s, inner);
                    break;
                }
            }
        }
    }
};

}  // namespace

PlannerProgram parse_program(const std::string& text) {
    const Sexp top = Reader(text).read_top();
    if (!top.is_list() || top.head() != "policy")
        throw ParseError("a program starts with (policy NAME ...)", top.is_list() && !top.items.empty() ? top.items[0].pos : top.pos,
                         {"(policy"});
    if (top.items.size() < 2) throw ParseError("missing policy name", top.end, {"a name"});
    PlannerProgram prog;
    prog.name = expect_symbol(top.items[1], "a policy name");

    std::set<std::string> scope;
    Checker check;
    bool have_plan = false;
    for (std::size_t i = 2; i < top.items.size(); ++i) {
        const Sexp& e = top.items[i];
        if (have_plan) throw ParseError("nothing may follow (plan ...)", e.pos, {"')'"});
        expect_list(e, "bind");
        const std::string h = e.head();
        if (h == "bind") {
            arity(e, 2);
            Binding b;
            b.pos = e.pos;
            b.var = expect_symbol(e.items[1], "a variable");
            b.query = parse_query(e.items[2]);
            check.query(b.query, scope);
            if (!scope.insert(b.var).second) throw ParseError("variable '" + b.var + "' bound twice", e.items[1].pos);
            prog.bindings.push_back(std::move(b));
        } else if (h == "plan") {
            min_arity(e, 1);
            prog.plan = parse_items(e.items, 1);
            have_plan = true;
        } else {
            throw UnknownForm("unknown top-level form '" + h + "'", e.items[0].pos, {"bind", "plan"});
        }
    }
    if (!have_plan) throw ParseError("missing (plan ...)", top.end, {"(bind", "(plan"});
    check.collect(prog.plan);
    check.items(prog.plan, scope);
    return prog;
}

std::string instantiate_plan(const std::string& text, const std::map<std::string, std::string>& params) {
    std::string out;
    SourcePos pos;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '$' && i + 1 < text.size() && text[i + 1] == '{') {
            const std::size_t close = text.find('}', i + 2);
            if (close == std::string::npos) throw ParseError("unterminated placeholder", pos, {"'}'"});
            const std::string key = text.substr(i + 2, close - i - 2);
            auto it = params.find(key);
            if (it == params.end()) throw ParseError("unknown placeholder '" + key + "'", pos);
            out += it->second;
            pos.col += static_cast<int>(close - i + 1);
            i = close;
            continue;
        }
        out += text[i];
        if (text[i] == '\n') {
            ++pos.line;
            pos.col = 1;
        } else if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
            ++pos.col;
        }
    }
    return out;
}

}  // namespace codegraph
