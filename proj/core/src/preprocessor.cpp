#include "miniform/preprocessor.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace miniform {

namespace {

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return std::string(s.substr(b, e - b));
}

bool isNameChar(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::vector<std::string> splitTopLevel(const std::string& s, char sep) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(' || c == '{' || c == '[')
            ++depth;
        else if (c == ')' || c == '}' || c == ']')
            --depth;
        if (c == sep && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty() || !out.empty())
        out.push_back(trim(cur));
    return out;
}

} // namespace

// --- preprocessor arithmetic -------------------------------------------------

namespace {

struct ArithParser {
    std::string_view s;
    size_t pos = 0;

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
            ++pos;
    }

    PPNumber expr() {
        PPNumber v = term();
        while (true) {
            skip();
            if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
                char op = s[pos++];
                PPNumber r = term();
                if (op == '+')
                    v += r;
                else
                    v -= r;
            } else {
                break;
            }
        }
        return v;
    }

    PPNumber term() {
        PPNumber v = factor();
        while (true) {
            skip();
            if (pos < s.size() && (s[pos] == '*' || s[pos] == '/')) {
                char op = s[pos++];
                PPNumber r = factor();
                if (op == '*') {
                    v *= r;
                } else {
                    if (r.is_zero())
                        throw PPError{"Division by zero in preprocessor arithmetic"};
                    v /= r; // cpp_int divides toward zero
                }
            } else {
                break;
            }
        }
        return v;
    }

    PPNumber factor() {
        skip();
        if (pos >= s.size())
            throw PPError{"Missing operand in preprocessor arithmetic"};
        char c = s[pos];
        if (c == '-') {
            ++pos;
            return -factor();
        }
        if (c == '+') {
            ++pos;
            return factor();
        }
        if (c == '(') {
            ++pos;
            PPNumber v = expr();
            skip();
            if (pos >= s.size() || s[pos] != ')')
                throw PPError{"Unbalanced parentheses in preprocessor arithmetic"};
            ++pos;
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
                ++pos;
            return PPNumber(std::string(s.substr(start, pos - start)));
        }
        throw PPError{"Non-numeric token in preprocessor arithmetic: " +
                      std::string(s.substr(pos))};
    }
};

} // namespace

PPNumber ppArith(std::string_view text) {
    ArithParser p{text};
    PPNumber v = p.expr();
    p.skip();
    if (p.pos != text.size())
        throw PPError{"Trailing text in preprocessor arithmetic: " +
                      std::string(text.substr(p.pos))};
    return v;
}

// --- triple-dot sequence expansion -------------------------------------------

namespace {

struct SeqItem {
    std::string skeleton; // digits replaced by \x01 markers
    std::vector<long long> numbers;
};

SeqItem splitNumbers(const std::string& s) {
    SeqItem it;
    size_t i = 0;
    while (i < s.size()) {
        if (std::isdigit(static_cast<unsigned char>(s[i]))) {
            size_t start = i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
                ++i;
            it.numbers.push_back(std::stoll(s.substr(start, i - start)));
            it.skeleton += '\x01';
        } else {
            it.skeleton += s[i++];
        }
    }
    return it;
}

std::string buildItem(const SeqItem& base, const std::vector<long long>& numbers) {
    std::string out;
    size_t n = 0;
    for (char c : base.skeleton) {
        if (c == '\x01')
            out += std::to_string(numbers[n++]);
        else
            out += c;
    }
    return out;
}

bool isItemChar(char c) {
    return isNameChar(c) || c == '?';
}

} // namespace

std::string expandSequences(const std::string& text) {
    std::string s = text;
    size_t search = 0;
    while (true) {
        // find "..." outside quotes
        size_t dots = std::string::npos;
        bool quoted = false;
        for (size_t i = search; i + 2 < s.size(); ++i) {
            if (s[i] == '"')
                quoted = !quoted;
            else if (!quoted && s[i] == '.' && s[i + 1] == '.' && s[i + 2] == '.') {
                dots = i;
                break;
            }
        }
        if (dots == std::string::npos)
            return s;

        // separator before
        size_t p = dots;
        while (p > 0 && std::isspace(static_cast<unsigned char>(s[p - 1])))
            --p;
        if (p == 0)
            throw PPError{"Bad ... sequence"};
        char sep = s[p - 1];
        if (sep != ',' && sep != '+' && sep != '*')
            throw PPError{std::string("Bad separator before ...: ") + sep};
        size_t sepPos = p - 1;
        // left item
        size_t q = sepPos;
        while (q > 0 && std::isspace(static_cast<unsigned char>(s[q - 1])))
            --q;
        std::string left;
        size_t leftStart;
        if (q > 0 && s[q - 1] == '>') {
            size_t open = s.rfind('<', q - 1);
            if (open == std::string::npos)
                throw PPError{"Unmatched > in ... sequence"};
            left = s.substr(open + 1, q - 1 - open - 1);
            leftStart = open;
        } else {
            size_t b = q;
            while (b > 0 && isItemChar(s[b - 1]))
                --b;
            if (b == q)
                throw PPError{"Missing item before ..."};
            left = s.substr(b, q - b);
            leftStart = b;
        }
        // separator after
        p = dots + 3;
        while (p < s.size() && std::isspace(static_cast<unsigned char>(s[p])))
            ++p;
        if (p >= s.size() || s[p] != sep)
            throw PPError{"Mismatched separators around ..."};
        ++p;
        while (p < s.size() && std::isspace(static_cast<unsigned char>(s[p])))
            ++p;
        std::string right;
        size_t rightEnd;
        if (p < s.size() && s[p] == '<') {
            size_t close = s.find('>', p);
            if (close == std::string::npos)
                throw PPError{"Unmatched < in ... sequence"};
            right = s.substr(p + 1, close - p - 1);
            rightEnd = close + 1;
        } else {
            size_t b = p;
            while (b < s.size() && isItemChar(s[b]))
                ++b;
            if (b == p)
                throw PPError{"Missing item after ..."};
            right = s.substr(p, b - p);
            rightEnd = b;
        }

        SeqItem li = splitNumbers(left);
        SeqItem ri = splitNumbers(right);
        if (li.skeleton != ri.skeleton || li.numbers.empty())
            throw PPError{"Items around ... differ in shape: " + left + " vs " + right};
        long long delta = 0;
        for (size_t i = 0; i < li.numbers.size(); ++i) {
            long long d = ri.numbers[i] - li.numbers[i];
            if (i == 0)
                delta = std::llabs(d);
            else if (std::llabs(d) != delta)
                throw PPError{"Unequal differences in running pattern: " + left + " ... " +
                              right};
        }
        long long steps = delta + 1;
        std::string replacement;
        for (long long k = 0; k < steps; ++k) {
            std::vector<long long> nums(li.numbers.size());
            for (size_t i = 0; i < li.numbers.size(); ++i) {
                long long d = ri.numbers[i] - li.numbers[i];
                long long sign = d > 0 ? 1 : (d < 0 ? -1 : 0);
                nums[i] = li.numbers[i] + sign * k;
            }
            if (k)
                replacement += sep;
            replacement += buildItem(li, nums);
        }
        s = s.substr(0, leftStart) + replacement + s.substr(rightEnd);
        search = leftStart + replacement.size();
    }
}

// --- Preprocessor -------------------------------------------------------------

Preprocessor::Preprocessor(std::string mainText, std::string mainFile, PPEnv env, Hooks hooks)
    : env_(std::move(env)), hooks_(std::move(hooks)) {
    Frame f;
    f.kind = Frame::File;
    std::istringstream in(mainText);
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        f.lines.push_back({line, mainFile, no});
    }
    frames_.push_back(std::move(f));
}

void Preprocessor::fail(const std::string& msg, const SourceLine& ln) {
    throw PPError{msg, ln.file, ln.line};
}

int Preprocessor::loopDepth() const {
    int d = 0;
    for (const Frame& f : frames_)
        if (f.kind == Frame::Loop)
            ++d;
    return d;
}

bool Preprocessor::condActive() const {
    for (const CondState& c : conds_)
        if (!c.active)
            return false;
    return true;
}

std::optional<Preprocessor::SourceLine> Preprocessor::nextLine() {
    while (!frames_.empty()) {
        Frame& f = frames_.back();
        if (f.pos < f.lines.size())
            return f.lines[f.pos++];
        if (f.kind == Frame::Loop && !f.loopDone) {
            f.current += f.step;
            bool more = f.step > 0 ? f.current <= f.bound : f.current >= f.bound;
            if (more) {
                setVar(f.var, f.current.str());
                f.pos = 0;
                continue;
            }
            env_.definitions.erase(f.var);
        }
        frames_.pop_back();
    }
    return std::nullopt;
}

std::string Preprocessor::lookupVar(const std::string& name, bool* found) {
    for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
        if (it->kind == Frame::Proc) {
            auto l = it->locals.find(name);
            if (l != it->locals.end()) {
                if (found)
                    *found = true;
                return l->second;
            }
        }
    }
    auto g = env_.definitions.find(name);
    if (g != env_.definitions.end()) {
        if (found)
            *found = true;
        return g->second;
    }
    if (found)
        *found = false;
    return {};
}

void Preprocessor::setVar(const std::string& name, const std::string& value) {
    for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
        if (it->kind == Frame::Proc) {
            auto l = it->locals.find(name);
            if (l != it->locals.end()) {
                l->second = value;
                return;
            }
        }
    }
    env_.definitions[name] = value;
}

std::string Preprocessor::interpolate(const std::string& text, int depth) {
    if (depth > 100)
        throw PPError{"Preprocessor interpolation too deep (recursive definition?)"};
    std::string out;
    out.reserve(text.size());
    size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c != '`') {
            out += c;
            ++i;
            continue;
        }
        // find matching quote, allowing nesting
        size_t j = i + 1;
        int nest = 0;
        std::string inner;
        for (; j < text.size(); ++j) {
            if (text[j] == '`') {
                ++nest;
                inner += text[j];
            } else if (text[j] == '\'') {
                if (nest == 0)
                    break;
                --nest;
                inner += text[j];
            } else {
                inner += text[j];
            }
        }
        if (j >= text.size())
            throw PPError{"Unmatched ` in " + text};
        std::string name = interpolate(inner, depth + 1);
        std::string value;
        if (!name.empty() && name[0] == '$') {
            std::string dn = name.substr(1);
            if (!hooks_.dollarText)
                throw PPError{"$-variable interpolation not available"};
            auto v = hooks_.dollarText(dn);
            if (!v)
                throw PPError{"Undefined $-variable `" + name + "'"};
            value = *v;
        } else if (name.size() > 2 && (name.ends_with("++") || name.ends_with("--"))) {
            bool inc = name.ends_with("++");
            std::string base = name.substr(0, name.size() - 2);
            bool found = false;
            std::string cur = lookupVar(base, &found);
            if (!found)
                throw PPError{"Postincrement of undefined preprocessor variable `" + base +
                              "'"};
            PPNumber n;
            try {
                n = ppArith(cur);
            } catch (const PPError&) {
                throw PPError{"Postincrement of non-numeric preprocessor variable `" + base +
                              "'"};
            }
            value = cur;
            if (inc)
                n += 1;
            else
                n -= 1;
            setVar(base, n.str());
        } else {
            bool found = false;
            value = lookupVar(name, &found);
            if (!found)
                throw PPError{"Undefined preprocessor variable `" + name + "'"};
        }
        if (value.find('`') != std::string::npos)
            value = interpolate(value, depth + 1);
        out += value;
        i = j + 1;
    }
    return out;
}

std::vector<Preprocessor::SourceLine> Preprocessor::captureBlock(const char* endWord,
                                                                 const char* startWord,
                                                                 const SourceLine& at) {
    std::vector<SourceLine> body;
    int nest = 0;
    while (true) {
        auto ln = nextLine();
        if (!ln)
            fail(std::string("Missing #") + endWord, at);
        std::string t = trim(ln->text);
        if (!t.empty() && t[0] == '#') {
            std::string word;
            size_t k = 1;
            while (k < t.size() && std::isalpha(static_cast<unsigned char>(t[k])))
                word += t[k++];
            std::string lower;
            for (char ch : word)
                lower += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
            if (lower == startWord) {
                ++nest;
            } else if (lower == endWord) {
                if (nest == 0)
                    return body;
                --nest;
            }
        }
        body.push_back(*ln);
    }
}

void Preprocessor::startLoop(const std::string& args, const SourceLine& ln) {
    // var = lo,hi[,step]
    size_t eq = args.find('=');
    if (eq == std::string::npos)
        fail("Bad #do syntax", ln);
    std::string var = trim(args.substr(0, eq));
    if (var.empty())
        fail("Missing #do variable", ln);
    std::string boundsText = interpolate(args.substr(eq + 1));
    auto parts = splitTopLevel(boundsText, ',');
    if (parts.size() < 2 || parts.size() > 3)
        fail("Bad #do bounds", ln);
    PPNumber lo, hi, step = 1;
    try {
        lo = ppArith(parts[0]);
        hi = ppArith(parts[1]);
        if (parts.size() == 3)
            step = ppArith(parts[2]);
    } catch (PPError& e) {
        e.file = ln.file;
        e.line = ln.line;
        throw;
    }
    if (step.is_zero())
        fail("#do step cannot be zero", ln);

    std::vector<SourceLine> body = captureBlock("enddo", "do", ln);
    bool runs = step > 0 ? lo <= hi : lo >= hi;
    if (!runs)
        return;
    Frame f;
    f.kind = Frame::Loop;
    f.lines = std::move(body);
    f.var = var;
    f.current = lo;
    f.bound = hi;
    f.step = step;
    frames_.push_back(std::move(f));
    setVar(var, lo.str());
}

void Preprocessor::abortInnermostLoop() {
    for (size_t i = frames_.size(); i-- > 0;) {
        if (frames_[i].kind == Frame::Loop) {
            env_.definitions.erase(frames_[i].var);
            frames_.erase(frames_.begin() + static_cast<long>(i), frames_.end());
            return;
        }
    }
}

void Preprocessor::callProcedure(const std::string& rest, const SourceLine& ln) {
    std::string text = trim(interpolate(rest));
    std::string name;
    size_t i = 0;
    while (i < text.size() && isNameChar(text[i]))
        name += text[i++];
    if (name.empty())
        fail("Missing procedure name in #call", ln);
    std::vector<std::string> args;
    if (i < text.size() && text[i] == '(') {
        size_t close = text.rfind(')');
        if (close == std::string::npos || close < i)
            fail("Unbalanced #call argument list", ln);
        std::string argText = text.substr(i + 1, close - i - 1);
        if (!trim(argText).empty())
            args = splitTopLevel(argText, ',');
    }
    auto it = env_.procedures.find(name);
    if (it == env_.procedures.end()) {
        // search name.prc on the include path
        for (const std::string& dir : env_.includePath) {
            std::string path = dir.empty() ? name + ".prc" : dir + "/" + name + ".prc";
            std::ifstream in(path);
            if (!in)
                continue;
            std::string fileText((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
            // register all procedures contained in the file
            Preprocessor sub(fileText, path, PPEnv{}, Hooks{});
            while (true) {
                auto item = sub.next();
                if (!item)
                    break;
                // only declarations expected; statements in a .prc file are an error
                throw PPError{"Unexpected statement in procedure file " + path, ln.file,
                              ln.line};
            }
            for (auto& [pname, proc] : sub.env_.procedures)
                env_.procedures.emplace(pname, std::move(proc));
            it = env_.procedures.find(name);
            break;
        }
    }
    if (it == env_.procedures.end())
        fail("Procedure " + name + " not found (no #procedure and no " + name + ".prc)", ln);
    const Procedure& proc = it->second;
    if (args.size() != proc.params.size())
        fail("Procedure " + name + " expects " + std::to_string(proc.params.size()) +
                 " argument(s)",
             ln);
    Frame f;
    f.kind = Frame::Proc;
    for (const Procedure::Line& l : proc.body)
        f.lines.push_back({l.text, l.file, l.line});
    for (size_t k = 0; k < args.size(); ++k)
        f.locals[proc.params[k]] = args[k];
    frames_.push_back(std::move(f));
}

void Preprocessor::handleDirective(const SourceLine& ln) {
    std::string t = trim(ln.text);
    // '#-' / '#+' toggle input listing; accepted and ignored
    if (t.size() >= 2 && (t[1] == '-' || t[1] == '+'))
        return;
    if (t.size() >= 2 && t[1] == '$') {
        // #$name = rhs;
        if (!condActive())
            return;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            fail("Bad #$ assignment", ln);
        std::string name = trim(t.substr(2, eq - 2));
        std::string rhs = trim(t.substr(eq + 1));
        if (!rhs.empty() && rhs.back() == ';')
            rhs.pop_back();
        if (!hooks_.dollarAssign)
            fail("#$ not available here", ln);
        hooks_.dollarAssign(name, interpolate(rhs), ln.file, ln.line);
        return;
    }

    std::string word;
    size_t i = 1;
    while (i < t.size() && std::isalpha(static_cast<unsigned char>(t[i])))
        word += static_cast<char>(std::tolower(static_cast<unsigned char>(t[i]))), ++i;
    std::string rest = trim(t.substr(i));

    // conditionals are handled even while skipping
    if (word == "ifdef" || word == "ifndef") {
        if (!condActive()) {
            conds_.push_back({false, true, false});
            return;
        }
        std::string arg = rest;
        if (!arg.empty() && arg.front() == '`' && arg.back() == '\'')
            arg = arg.substr(1, arg.size() - 2);
        arg = interpolate(arg);
        bool found = false;
        lookupVar(arg, &found);
        bool active = word == "ifdef" ? found : !found;
        conds_.push_back({active, active, true});
        return;
    }
    if (word == "if") {
        if (!condActive()) {
            conds_.push_back({false, true, false});
            return;
        }
        std::string cond = interpolate(rest);
        // integer comparison or bare value
        static const char* ops[] = {"==", "!=", ">=", "<=", ">", "<"};
        bool value = false;
        bool matched = false;
        for (const char* op : ops) {
            size_t p = cond.find(op);
            if (p == std::string::npos)
                continue;
            PPNumber l, r;
            try {
                l = ppArith(trim(cond.substr(0, p)));
                r = ppArith(trim(cond.substr(p + std::strlen(op))));
            } catch (PPError& e) {
                e.file = ln.file;
                e.line = ln.line;
                throw;
            }
            std::string o = op;
            value = o == "==" ? l == r
                  : o == "!=" ? l != r
                  : o == ">=" ? l >= r
                  : o == "<=" ? l <= r
                  : o == ">"  ? l > r
                              : l < r;
            matched = true;
            break;
        }
        if (!matched) {
            try {
                value = !ppArith(trim(cond)).is_zero();
            } catch (PPError& e) {
                e.file = ln.file;
                e.line = ln.line;
                throw;
            }
        }
        conds_.push_back({value, value, true});
        return;
    }
    if (word == "else") {
        if (conds_.empty())
            fail("#else without #if", ln);
        CondState& c = conds_.back();
        if (!c.wasActive)
            return;
        c.active = !c.taken;
        c.taken = true;
        return;
    }
    if (word == "endif") {
        if (conds_.empty())
            fail("#endif without #if", ln);
        conds_.pop_back();
        return;
    }

    if (!condActive())
        return;

    if (word == "define") {
        // #define name "value"   (value taken verbatim; no evaluation)
        std::string r = rest;
        size_t k = 0;
        std::string rawName;
        while (k < r.size() && !std::isspace(static_cast<unsigned char>(r[k])))
            rawName += r[k++];
        std::string name = interpolate(rawName);
        std::string value = trim(r.substr(k));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        if (value.empty())
            value = "1";
        env_.definitions[name] = value;
        return;
    }
    if (word == "undefine") {
        env_.definitions.erase(interpolate(rest));
        return;
    }
    if (word == "do") {
        startLoop(rest, ln);
        return;
    }
    if (word == "enddo") {
        fail("#enddo without #do", ln);
    }
    if (word == "procedure") {
        std::string name;
        size_t k = 0;
        while (k < rest.size() && isNameChar(rest[k]))
            name += rest[k++];
        if (name.empty())
            fail("Missing #procedure name", ln);
        Procedure proc;
        proc.name = name;
        if (k < rest.size() && rest[k] == '(') {
            size_t close = rest.find(')', k);
            if (close == std::string::npos)
                fail("Unbalanced parameter list in #procedure", ln);
            for (const std::string& p : splitTopLevel(rest.substr(k + 1, close - k - 1), ','))
                if (!p.empty())
                    proc.params.push_back(p);
        }
        for (const SourceLine& l : captureBlock("endprocedure", "procedure", ln))
            proc.body.push_back({l.text, l.file, l.line});
        env_.procedures[name] = std::move(proc);
        return;
    }
    if (word == "endprocedure") {
        fail("#endprocedure without #procedure", ln);
    }
    if (word == "call") {
        callProcedure(rest, ln);
        return;
    }
    if (word == "include") {
        std::string fname = trim(interpolate(rest));
        if (fname.empty())
            fail("Missing file name in #include", ln);
        std::string content;
        bool found = false;
        for (const std::string& dir : env_.includePath) {
            std::string path = dir.empty() ? fname : dir + "/" + fname;
            std::ifstream in(path);
            if (in) {
                content.assign((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
                found = true;
                break;
            }
        }
        if (!found)
            fail("Cannot open include file " + fname, ln);
        Frame f;
        f.kind = Frame::File;
        std::istringstream in(content);
        std::string line;
        int no = 0;
        while (std::getline(in, line)) {
            ++no;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            f.lines.push_back({line, fname, no});
        }
        frames_.push_back(std::move(f));
        return;
    }
    if (word == "write") {
        // #write [<file>] "format" [, $args]
        std::string r = trim(rest);
        std::string target;
        if (!r.empty() && r[0] == '<') {
            size_t close = r.find('>');
            if (close == std::string::npos)
                fail("Unbalanced <file> in #write", ln);
            target = interpolate(trim(r.substr(1, close - 1)));
            r = trim(r.substr(close + 1));
        }
        if (r.size() < 2 || r[0] != '"')
            fail("Missing format string in #write", ln);
        size_t close = r.rfind('"');
        if (close == 0)
            fail("Unbalanced format string in #write", ln);
        std::string fmt = r.substr(1, close - 1);
        std::vector<std::string> args;
        std::string tail = trim(r.substr(close + 1));
        if (!tail.empty()) {
            if (tail[0] != ',')
                fail("Bad #write argument list", ln);
            for (const std::string& a : splitTopLevel(tail.substr(1), ','))
                args.push_back(a);
        }
        std::string text = interpolate(fmt);
        // escapes and %$ argument splicing
        std::string outText;
        size_t ai = 0;
        for (size_t k = 0; k < text.size(); ++k) {
            char c = text[k];
            if (c == '\\' && k + 1 < text.size()) {
                char n = text[++k];
                outText += n == 'n' ? '\n' : n == 't' ? '\t' : n;
            } else if (c == '%' && k + 1 < text.size() && text[k + 1] == '$') {
                ++k;
                if (ai >= args.size())
                    fail("Too few arguments for #write format", ln);
                std::string a = trim(args[ai++]);
                if (!a.empty() && a[0] == '$') {
                    if (!hooks_.dollarText)
                        fail("$-variable not available in #write", ln);
                    auto v = hooks_.dollarText(a.substr(1));
                    if (!v)
                        fail("Undefined $-variable " + a + " in #write", ln);
                    outText += *v;
                } else {
                    outText += a;
                }
            } else if (c == '%' && k + 1 < text.size() && text[k + 1] == '%') {
                ++k;
                outText += '%';
            } else {
                outText += c;
            }
        }
        outText += '\n';
        if (hooks_.writeFile)
            hooks_.writeFile(target, outText);
        return;
    }
    if (word == "message") {
        // informational; routed to regular output via the write hook
        if (hooks_.writeFile)
            hooks_.writeFile("", "~~~" + interpolate(rest) + "\n");
        return;
    }
    fail("Unknown preprocessor directive #" + word, ln);
}

void Preprocessor::pushStatementText(const SourceLine& ln) {
    std::string text = interpolate(ln.text);
    size_t k = 0;
    while (k < text.size()) {
        if (stmtBuf_.empty()) {
            // skip leading blanks; record position of statement start
            while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k])))
                ++k;
            if (k >= text.size())
                return;
            stmtFile_ = ln.file;
            stmtLine_ = ln.line;
        }
        bool quoted = false;
        bool closed = false;
        for (; k < text.size(); ++k) {
            char c = text[k];
            if (c == '"')
                quoted = !quoted;
            if (c == ';' && !quoted) {
                closed = true;
                ++k;
                break;
            }
            stmtBuf_ += c;
        }
        if (closed) {
            PPItem item;
            item.kind = PPItem::Stmt;
            item.text = expandSequences(trim(stmtBuf_));
            item.file = stmtFile_;
            item.line = stmtLine_;
            item.loopDepth = loopDepth();
            if (!item.text.empty())
                queue_.push_back(std::move(item));
            stmtBuf_.clear();
            // trailing comment after ';'
            size_t r = k;
            while (r < text.size() && std::isspace(static_cast<unsigned char>(text[r])))
                ++r;
            if (r < text.size() && text[r] == '*')
                return; // rest of the line is commentary
        } else {
            stmtBuf_ += ' '; // statement continues on the next line
            return;
        }
    }
}

std::optional<PPItem> Preprocessor::next() {
    while (true) {
        if (!queue_.empty()) {
            PPItem item = std::move(queue_.front());
            queue_.pop_front();
            return item;
        }
        if (sawEnd_)
            return std::nullopt;
        auto ln = nextLine();
        if (!ln)
            return std::nullopt;
        const std::string& raw = ln->text;
        size_t first = raw.find_first_not_of(" \t");
        if (first == std::string::npos)
            continue;
        char c = raw[first];
        if (c == '*')
            continue; // comment line
        if (c == '#') {
            SourceLine dl = *ln;
            dl.text = raw.substr(first);
            handleDirective(dl);
            continue;
        }
        if (!condActive())
            continue;
        if (c == '.' && stmtBuf_.empty()) {
            std::string t = trim(interpolate(raw.substr(first)));
            if (!t.empty() && t.back() == ';')
                t.pop_back();
            std::string word;
            size_t k = 1;
            while (k < t.size() && std::isalpha(static_cast<unsigned char>(t[k])))
                word += static_cast<char>(std::tolower(static_cast<unsigned char>(t[k]))), ++k;
            PPItem item;
            item.file = ln->file;
            item.line = ln->line;
            item.loopDepth = loopDepth();
            if (word == "end") {
                item.kind = PPItem::EndProgram;
                sawEnd_ = true;
            } else if (word == "sort" || word == "global" || word == "store") {
                // .store without stored-expression support behaves as .sort
                item.kind = PPItem::EndModule;
                item.text = trim(t.substr(k));
            } else {
                throw PPError{"Unknown module instruction " + t, ln->file, ln->line};
            }
            return item;
        }
        if (!stmtBuf_.empty() || c != '.') {
            SourceLine sl = *ln;
            pushStatementText(sl);
            continue;
        }
    }
}

} // namespace miniform
