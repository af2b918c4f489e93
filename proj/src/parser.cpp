#include "styloc/ast.hpp"

#include <optional>
#include <unordered_set>

namespace styloc {

const char* node_kind_name(NodeKind k) {
    static const char* names[kNodeKindCount] = {
        "TranslationUnit", "FunctionDef", "ParamList", "Param",
        "CompoundStmt",    "Decl",        "If",        "Else",
        "For",             "While",       "DoWhile",   "Switch",
        "Case",            "Default",     "Return",    "Break",
        "Continue",        "Goto",        "Label",     "ExprStmt",
        "Call",            "BinaryOp",    "UnaryOp",   "Ternary",
        "AssignOp",        "Identifier",  "Literal"};
    return names[static_cast<int>(k)];
}

int node_kind_from_name(std::string_view name) {
    for (int i = 0; i < kNodeKindCount; ++i) {
        if (node_kind_name(static_cast<NodeKind>(i)) == name) return i;
    }
    return -1;
}

std::size_t subtree_size(const AstNode& n) {
    std::size_t total = 1;
    for (const AstNode& c : n.children) total += subtree_size(c);
    return total;
}

std::vector<const AstNode*> functions_of(const AstNode& root) {
    std::vector<const AstNode*> fns;
    for (const AstNode& c : root.children) {
        if (c.kind == NodeKind::FunctionDef) fns.push_back(&c);
    }
    return fns;
}

namespace {

bool is_type_keyword(std::string_view t) {
    return t == "void" || t == "char" || t == "short" || t == "int" ||
           t == "long" || t == "float" || t == "double" || t == "signed" ||
           t == "unsigned" || t == "_Bool" || t == "_Complex" ||
           t == "_Imaginary";
}

bool is_qualifier_keyword(std::string_view t) {
    return t == "const" || t == "volatile" || t == "restrict";
}

bool is_storage_keyword(std::string_view t) {
    return t == "typedef" || t == "extern" || t == "static" || t == "auto" ||
           t == "register" || t == "inline";
}

bool is_gnu_noise(std::string_view t) {
    return t == "__attribute__" || t == "__extension__" || t == "__restrict" ||
           t == "__restrict__" || t == "__inline" || t == "__inline__" ||
           t == "__volatile__" || t == "__const" || t == "__signed__";
}

const std::unordered_set<std::string>& seeded_type_names() {
    static const std::unordered_set<std::string> s = {
        "size_t",   "ssize_t",  "ptrdiff_t", "intptr_t",  "uintptr_t",
        "int8_t",   "int16_t",  "int32_t",   "int64_t",   "uint8_t",
        "uint16_t", "uint32_t", "uint64_t",  "FILE",      "va_list",
        "time_t",   "clock_t",  "off_t",     "pid_t",     "uid_t",
        "gid_t",    "DIR",      "socklen_t", "bool",      "wchar_t",
        "intmax_t", "uintmax_t"};
    return s;
}

struct Declarator {
    std::string name;
    int name_fidx = -1;
    bool is_function = false;
    std::optional<AstNode> params;       // built only when a '(...)' suffix is seen
    std::vector<AstNode> array_sizes;
};

class Parser {
public:
    explicit Parser(const std::vector<Token>& tokens) : tokens_(tokens) {
        for (int i = 0; i < static_cast<int>(tokens.size()); ++i) {
            TokenKind k = tokens[i].kind;
            if (k != TokenKind::Comment && k != TokenKind::PreprocessorLine) {
                stream_.push_back(i);
            }
        }
        known_types_ = seeded_type_names();
    }

    ParseOutcome run() {
        ParseOutcome out;
        AstNode root;
        root.kind = NodeKind::TranslationUnit;
        if (!tokens_.empty()) {
            root.span_first = 0;
            root.span_last = static_cast<int>(tokens_.size()) - 1;
        }
        while (!eof()) {
            if (text() == ";") {  // stray top-level semicolon
                next();
                continue;
            }
            std::size_t before = pos_;
            auto item = parse_external();
            if (item) root.children.push_back(std::move(*item));
            if (pos_ == before) sync();  // guarantee progress
        }
        out.ast = std::move(root);
        out.has_ast = true;
        out.diagnostics = std::move(diags_);
        out.parsed_fully = out.diagnostics.empty();
        return out;
    }

private:
    const std::vector<Token>& tokens_;
    std::vector<int> stream_;  // indices of non-comment, non-preprocessor tokens
    std::size_t pos_ = 0;
    std::vector<Diagnostic> diags_;
    std::unordered_set<std::string> known_types_;

    // --- stream helpers -------------------------------------------------

    bool eof() const { return pos_ >= stream_.size(); }
    const Token& tok(std::size_t ahead = 0) const {
        return tokens_[stream_[pos_ + ahead]];
    }
    bool has(std::size_t ahead) const { return pos_ + ahead < stream_.size(); }
    std::string_view text(std::size_t ahead = 0) const {
        return has(ahead) ? std::string_view(tok(ahead).text)
                          : std::string_view();
    }
    TokenKind kind(std::size_t ahead = 0) const { return tok(ahead).kind; }
    int orig(std::size_t fpos) const { return stream_[fpos]; }
    int last_orig() const { return pos_ > 0 ? stream_[pos_ - 1] : -1; }
    void next() { ++pos_; }

    bool accept(std::string_view t) {
        if (!eof() && text() == t) {
            next();
            return true;
        }
        return false;
    }

    void expect(std::string_view t, const char* where) {
        if (!accept(t)) {
            diag(std::string("expected '") + std::string(t) + "' " + where);
        }
    }

    void diag(std::string msg) {
        int line = eof() ? (tokens_.empty() ? 1 : tokens_.back().line)
                         : tok().line;
        diags_.push_back({line, std::move(msg)});
    }

    // Skip to just past the next ';' at brace depth 0, or stop before a
    // closing '}' of the enclosing block. Consumes at least one token.
    void sync() {
        int depth = 0;
        bool first = true;
        while (!eof()) {
            std::string_view t = text();
            if (t == "{") {
                ++depth;
            } else if (t == "}") {
                if (depth == 0) {
                    if (first) next();  // stray '}' at this level
                    return;
                }
                --depth;
            } else if (t == ";" && depth == 0) {
                next();
                return;
            }
            next();
            first = false;
        }
    }

    void make_span(AstNode& n, std::size_t start_f) const {
        n.span_first = orig(start_f);
        n.span_last = last_orig();
    }

    bool is_known_type(std::string_view name) const {
        return known_types_.count(std::string(name)) > 0;
    }

    bool at_decl_start() const {
        if (eof()) return false;
        if (kind() == TokenKind::Keyword) {
            std::string_view t = text();
            return is_type_keyword(t) || is_qualifier_keyword(t) ||
                   is_storage_keyword(t) || t == "struct" || t == "union" ||
                   t == "enum";
        }
        if (kind() == TokenKind::Identifier) {
            return is_known_type(text()) || is_gnu_noise(text());
        }
        return false;
    }

    void consume_balanced(std::string_view open, std::string_view close) {
        if (!accept(open)) return;
        int depth = 1;
        while (!eof() && depth > 0) {
            if (text() == open) ++depth;
            else if (text() == close) --depth;
            next();
        }
        if (depth > 0) diag(std::string("unterminated '") + std::string(open) + "'");
    }

    // --- declarations ----------------------------------------------------

    struct SpecInfo {
        bool any = false;
        bool is_typedef = false;
    };

    SpecInfo parse_decl_specifiers() {
        SpecInfo info;
        bool saw_typename = false;
        while (!eof()) {
            std::string_view t = text();
            if (kind() == TokenKind::Keyword) {
                if (is_storage_keyword(t)) {
                    if (t == "typedef") info.is_typedef = true;
                    next();
                    info.any = true;
                    continue;
                }
                if (is_qualifier_keyword(t) || is_type_keyword(t)) {
                    next();
                    info.any = true;
                    continue;
                }
                if (t == "struct" || t == "union" || t == "enum") {
                    next();
                    info.any = true;
                    if (!eof() && kind() == TokenKind::Identifier) next();
                    if (!eof() && text() == "{") consume_balanced("{", "}");
                    continue;
                }
                break;
            }
            if (kind() == TokenKind::Identifier) {
                if (is_gnu_noise(t)) {
                    next();
                    if (!eof() && text() == "(") consume_balanced("(", ")");
                    continue;
                }
                if (!saw_typename && is_known_type(t)) {
                    // a typedef name acts as the base type, at most once
                    next();
                    info.any = true;
                    saw_typename = true;
                    continue;
                }
                break;
            }
            break;
        }
        return info;
    }

    Declarator parse_declarator() {
        Declarator d;
        while (!eof() &&
               (text() == "*" ||
                (kind() == TokenKind::Keyword && is_qualifier_keyword(text())) ||
                (kind() == TokenKind::Identifier && is_gnu_noise(text())))) {
            next();
        }
        if (!eof() && text() == "(" && has(1) &&
            (text(1) == "*" || text(1) == "(")) {
            next();  // grouped declarator, e.g. (*fn)(int)
            Declarator inner = parse_declarator();
            expect(")", "after grouped declarator");
            d.name = inner.name;
            d.name_fidx = inner.name_fidx;
            d.is_function = inner.is_function;
            if (inner.params) d.params = std::move(inner.params);
            for (auto& a : inner.array_sizes) d.array_sizes.push_back(std::move(a));
        } else if (!eof() && kind() == TokenKind::Identifier) {
            d.name = std::string(text());
            d.name_fidx = static_cast<int>(pos_);
            next();
        }
        while (!eof()) {
            if (text() == "(") {
                d.is_function = true;
                d.params = parse_param_list();
            } else if (text() == "[") {
                next();
                if (!eof() && text() != "]") {
                    auto sz = parse_assignment();
                    if (sz) d.array_sizes.push_back(std::move(*sz));
                }
                expect("]", "after array size");
            } else {
                break;
            }
        }
        return d;
    }

    AstNode parse_param_list() {
        std::size_t start = pos_;
        AstNode params;
        params.kind = NodeKind::ParamList;
        expect("(", "to open parameter list");
        if (accept(")")) {
            make_span(params, start);
            return params;
        }
        if (!eof() && text() == "void" && text(1) == ")") {
            next();
            next();
            make_span(params, start);
            return params;
        }
        while (!eof()) {
            if (text() == "...") {
                next();  // variadic marker is not a formal parameter
            } else {
                std::size_t pstart = pos_;
                parse_decl_specifiers();
                Declarator d = parse_declarator();
                if (pos_ == pstart) {
                    diag("cannot parse parameter");
                    break;
                }
                AstNode p;
                p.kind = NodeKind::Param;
                p.text = d.name;
                make_span(p, pstart);
                params.children.push_back(std::move(p));
            }
            if (!accept(",")) break;
        }
        expect(")", "to close parameter list");
        make_span(params, start);
        return params;
    }

    // Initializers: braced lists are flattened into the Decl's children.
    void parse_initializer_into(std::vector<AstNode>& children) {
        if (!eof() && text() == "{") {
            next();
            while (!eof() && text() != "}") {
                // skip designators: .field = / [expr] =
                if (text() == ".") {
                    next();
                    if (!eof() && kind() == TokenKind::Identifier) next();
                    accept("=");
                } else if (text() == "[") {
                    next();
                    auto idx = parse_assignment();
                    (void)idx;
                    expect("]", "after designator index");
                    accept("=");
                }
                parse_initializer_into(children);
                if (!accept(",")) break;
            }
            expect("}", "to close initializer list");
            return;
        }
        auto e = parse_assignment();
        if (e) children.push_back(std::move(*e));
        else diag("expected initializer expression");
    }

    // Parses one declaration (after deciding it is one). Returns a Decl node;
    // used both at file scope and for local declarations / for-init.
    std::optional<AstNode> parse_decl_tail(SpecInfo spec, std::size_t start) {
        AstNode decl;
        decl.kind = NodeKind::Decl;
        if (accept(";")) {  // e.g. "struct point { ... };"
            make_span(decl, start);
            return decl;
        }
        while (!eof()) {
            Declarator d = parse_declarator();
            if (d.name.empty() && d.array_sizes.empty() && !d.is_function) {
                diag("expected declarator");
                sync();
                make_span(decl, start);
                return decl;
            }
            if (!d.name.empty()) {
                AstNode id;
                id.kind = NodeKind::Identifier;
                id.text = d.name;
                if (d.name_fidx >= 0) {
                    id.span_first = orig(d.name_fidx);
                    id.span_last = id.span_first;
                }
                decl.children.push_back(std::move(id));
                decl.decl_names.push_back(d.name);
            }
            for (auto& sz : d.array_sizes) decl.children.push_back(std::move(sz));
            if (accept("=")) parse_initializer_into(decl.children);
            if (!accept(",")) break;
        }
        expect(";", "after declaration");
        if (spec.is_typedef) {
            for (const auto& n : decl.decl_names) known_types_.insert(n);
            decl.decl_names.clear();  // typedef names are types, not variables
        }
        make_span(decl, start);
        return decl;
    }

    std::optional<AstNode> parse_external() {
        std::size_t start = pos_;
        if (at_decl_start() || kind() == TokenKind::Identifier) {
            SpecInfo spec = parse_decl_specifiers();
            if (!spec.any && kind(0) != TokenKind::Identifier) {
                diag("cannot parse top-level construct");
                sync();
                return std::nullopt;
            }
            // could still be an implicit-int definition like main() { ... }
            Declarator d = parse_declarator();
            if (d.is_function && !eof() && text() == "{") {
                AstNode fn;
                fn.kind = NodeKind::FunctionDef;
                fn.text = d.name;
                AstNode params = d.params ? std::move(*d.params)
                                          : AstNode{NodeKind::ParamList, {}, -1, -1, "", {}};
                fn.children.push_back(std::move(params));
                fn.children.push_back(parse_compound());
                make_span(fn, start);
                return fn;
            }
            if (!spec.any && d.name.empty()) {
                diag("cannot parse top-level construct");
                sync();
                return std::nullopt;
            }
            // plain declaration / prototype: drop any parsed param list
            return parse_decl_tail_from(spec, start, std::move(d));
        }
        diag("cannot parse top-level construct");
        sync();
        return std::nullopt;
    }

    // Continues a declaration whose first declarator was already consumed.
    std::optional<AstNode> parse_decl_tail_from(SpecInfo spec, std::size_t start,
                                                Declarator first) {
        AstNode decl;
        decl.kind = NodeKind::Decl;
        bool more = true;
        bool first_iter = true;
        while (more && !eof()) {
            Declarator d = first_iter ? std::move(first) : parse_declarator();
            first_iter = false;
            if (!d.name.empty()) {
                AstNode id;
                id.kind = NodeKind::Identifier;
                id.text = d.name;
                if (d.name_fidx >= 0) {
                    id.span_first = orig(d.name_fidx);
                    id.span_last = id.span_first;
                }
                decl.children.push_back(std::move(id));
                decl.decl_names.push_back(d.name);
            }
            for (auto& sz : d.array_sizes) decl.children.push_back(std::move(sz));
            if (accept("=")) parse_initializer_into(decl.children);
            more = accept(",");
        }
        expect(";", "after declaration");
        if (spec.is_typedef) {
            for (const auto& n : decl.decl_names) known_types_.insert(n);
            decl.decl_names.clear();
        }
        make_span(decl, start);
        return decl;
    }

    // --- statements --------------------------------------------------------

    AstNode parse_compound() {
        std::size_t start = pos_;
        AstNode block;
        block.kind = NodeKind::CompoundStmt;
        expect("{", "to open block");
        while (!eof() && text() != "}") {
            std::size_t before = pos_;
            auto stmt = parse_statement();
            if (stmt) block.children.push_back(std::move(*stmt));
            if (pos_ == before) sync();
        }
        expect("}", "to close block");
        make_span(block, start);
        return block;
    }

    std::optional<AstNode> parse_statement() {
        if (eof()) return std::nullopt;
        std::size_t start = pos_;
        std::string_view t = text();

        if (t == "{") return parse_compound();
        if (t == ";") {
            next();
            AstNode empty;
            empty.kind = NodeKind::ExprStmt;
            make_span(empty, start);
            return empty;
        }
        if (kind() == TokenKind::Keyword) {
            if (t == "if") return parse_if(start);
            if (t == "while") return parse_while(start);
            if (t == "do") return parse_do(start);
            if (t == "for") return parse_for(start);
            if (t == "switch") return parse_switch(start);
            if (t == "return") return parse_return(start);
            if (t == "break" || t == "continue") {
                AstNode n;
                n.kind = t == "break" ? NodeKind::Break : NodeKind::Continue;
                next();
                expect(";", "after jump statement");
                make_span(n, start);
                return n;
            }
            if (t == "goto") {
                AstNode n;
                n.kind = NodeKind::Goto;
                next();
                if (!eof() && kind() == TokenKind::Identifier) {
                    n.text = std::string(text());
                    next();
                } else {
                    diag("expected label after goto");
                }
                expect(";", "after goto");
                make_span(n, start);
                return n;
            }
            if (t == "case") {
                AstNode n;
                n.kind = NodeKind::Case;
                next();
                auto value = parse_ternary();
                if (value) n.children.push_back(std::move(*value));
                else diag("expected case value");
                expect(":", "after case value");
                if (!eof() && text() != "}") {
                    auto body = parse_statement();
                    if (body) n.children.push_back(std::move(*body));
                }
                make_span(n, start);
                return n;
            }
            if (t == "default") {
                AstNode n;
                n.kind = NodeKind::Default;
                next();
                expect(":", "after default");
                if (!eof() && text() != "}") {
                    auto body = parse_statement();
                    if (body) n.children.push_back(std::move(*body));
                }
                make_span(n, start);
                return n;
            }
            if (at_decl_start()) return parse_local_decl(start);
            diag("unexpected keyword '" + std::string(t) + "'");
            sync();
            return std::nullopt;
        }
        if (kind() == TokenKind::Identifier && has(1) && text(1) == ":") {
            AstNode n;
            n.kind = NodeKind::Label;
            n.text = std::string(t);
            next();
            next();
            if (!eof() && text() != "}") {
                auto body = parse_statement();
                if (body) n.children.push_back(std::move(*body));
            }
            make_span(n, start);
            return n;
        }
        if (at_decl_start()) return parse_local_decl(start);
        return parse_expr_statement(start);
    }

    std::optional<AstNode> parse_local_decl(std::size_t start) {
        SpecInfo spec = parse_decl_specifiers();
        return parse_decl_tail(spec, start);
    }

    std::optional<AstNode> parse_expr_statement(std::size_t start) {
        auto e = parse_expression();
        if (!e) {
            diag("cannot parse statement");
            sync();
            return std::nullopt;
        }
        AstNode n;
        n.kind = NodeKind::ExprStmt;
        n.children.push_back(std::move(*e));
        expect(";", "after expression");
        make_span(n, start);
        return n;
    }

    std::optional<AstNode> parse_if(std::size_t start) {
        AstNode n;
        n.kind = NodeKind::If;
        next();
        expect("(", "after if");
        auto cond = parse_expression();
        if (cond) n.children.push_back(std::move(*cond));
        else diag("expected condition");
        expect(")", "after condition");
        auto then = parse_statement();
        if (then) n.children.push_back(std::move(*then));
        if (!eof() && text() == "else") {
            std::size_t estart = pos_;
            AstNode els;
            els.kind = NodeKind::Else;
            next();
            auto body = parse_statement();
            if (body) els.children.push_back(std::move(*body));
            make_span(els, estart);
            n.children.push_back(std::move(els));
        }
        make_span(n, start);
        return n;
    }

    std::optional<AstNode> parse_while(std::size_t start) {
        AstNode n;
        n.kind = NodeKind::While;
        next();
        expect("(", "after while");
        auto cond = parse_expression();
        if (cond) n.children.push_back(std::move(*cond));
        else diag("expected condition");
        expect(")", "after condition");
        auto body = parse_statement();
        if (body) n.children.push_back(std::move(*body));
        make_span(n, start);
        return n;
    }

    std::optional<AstNode> parse_do(std::size_t start) {
        AstNode n;
        n.kind = NodeKind::DoWhile;
        next();
        auto body = parse_statement();
        if (body) n.children.push_back(std::move(*body));
        expect("while", "after do body");
        expect("(", "after while");
        auto cond = parse_expression();
        if (cond) n.children.push_back(std::move(*cond));
        else diag("expected condition");
        expect(")", "after condition");
        expect(";", "after do/while");
        make_span(n, start);
        return n;
    }

    std::optional<AstNode> parse_for(std::size_t start) {
        AstNode n;
        n.kind = NodeKind::For;
        next();
        expect("(", "after for");
        if (!accept(";")) {
            if (at_decl_start()) {
                std::size_t dstart = pos_;
                auto decl = parse_local_decl(dstart);
                if (decl) n.children.push_back(std::move(*decl));
            } else {
                std::size_t estart = pos_;
                auto init = parse_expr_statement(estart);
                if (init) n.children.push_back(std::move(*init));
            }
        }
        if (!eof() && text() != ";") {
            auto cond = parse_expression();
            if (cond) n.children.push_back(std::move(*cond));
        }
        expect(";", "after loop condition");
        if (!eof() && text() != ")") {
            auto step = parse_expression();
            if (step) n.children.push_back(std::move(*step));
        }
        expect(")", "after for header");
        auto body = parse_statement();
        if (body) n.children.push_back(std::move(*body));
        make_span(n, start);
        return n;
    }

    std::optional<AstNode> parse_switch(std::size_t start) {
        AstNode n;
        n.kind = NodeKind::Switch;
        next();
        expect("(", "after switch");
        auto cond = parse_expression();
        if (cond) n.children.push_back(std::move(*cond));
        else diag("expected controlling expression");
        expect(")", "after controlling expression");
        auto body = parse_statement();
        if (body) n.children.push_back(std::move(*body));
        make_span(n, start);
        return n;
    }

    std::optional<AstNode> parse_return(std::size_t start) {
        AstNode n;
        n.kind = NodeKind::Return;
        next();
        if (!eof() && text() != ";") {
            auto e = parse_expression();
            if (e) n.children.push_back(std::move(*e));
        }
        expect(";", "after return");
        make_span(n, start);
        return n;
    }

    // --- expressions -------------------------------------------------------

    std::optional<AstNode> parse_expression() {
        auto lhs = parse_assignment();
        if (!lhs) return std::nullopt;
        while (!eof() && text() == ",") {
            std::size_t start_tok = static_cast<std::size_t>(lhs->span_first);
            next();
            auto rhs = parse_assignment();
            if (!rhs) {
                diag("expected expression after ','");
                return lhs;
            }
            AstNode seq;
            seq.kind = NodeKind::BinaryOp;
            seq.text = ",";
            seq.span_first = static_cast<int>(start_tok);
            seq.span_last = last_orig();
            seq.children.push_back(std::move(*lhs));
            seq.children.push_back(std::move(*rhs));
            lhs = std::move(seq);
        }
        return lhs;
    }

    static bool is_assign_op(std::string_view t) {
        return t == "=" || t == "+=" || t == "-=" || t == "*=" || t == "/=" ||
               t == "%=" || t == "&=" || t == "^=" || t == "|=" || t == "<<=" ||
               t == ">>=";
    }

    std::optional<AstNode> parse_assignment() {
        auto lhs = parse_ternary();
        if (!lhs) return std::nullopt;
        if (!eof() && is_assign_op(text())) {
            AstNode n;
            n.kind = NodeKind::AssignOp;
            n.text = std::string(text());
            n.span_first = lhs->span_first;
            next();
            auto rhs = parse_assignment();
            if (!rhs) {
                diag("expected right-hand side of assignment");
                return lhs;
            }
            n.children.push_back(std::move(*lhs));
            n.children.push_back(std::move(*rhs));
            n.span_last = last_orig();
            return n;
        }
        return lhs;
    }

    std::optional<AstNode> parse_ternary() {
        auto cond = parse_binary(0);
        if (!cond) return std::nullopt;
        if (!eof() && text() == "?") {
            AstNode n;
            n.kind = NodeKind::Ternary;
            n.span_first = cond->span_first;
            next();
            n.children.push_back(std::move(*cond));
            auto then = parse_expression();
            if (then) n.children.push_back(std::move(*then));
            else diag("expected expression after '?'");
            expect(":", "in conditional expression");
            auto els = parse_assignment();
            if (els) n.children.push_back(std::move(*els));
            else diag("expected expression after ':'");
            n.span_last = last_orig();
            return n;
        }
        return cond;
    }

    // binary precedence levels, lowest first
    static int binary_level(std::string_view t) {
        if (t == "||") return 0;
        if (t == "&&") return 1;
        if (t == "|") return 2;
        if (t == "^") return 3;
        if (t == "&") return 4;
        if (t == "==" || t == "!=") return 5;
        if (t == "<" || t == ">" || t == "<=" || t == ">=") return 6;
        if (t == "<<" || t == ">>") return 7;
        if (t == "+" || t == "-") return 8;
        if (t == "*" || t == "/" || t == "%") return 9;
        return -1;
    }

    std::optional<AstNode> parse_binary(int min_level) {
        auto lhs = parse_unary();
        if (!lhs) return std::nullopt;
        while (!eof()) {
            int level = binary_level(text());
            if (level < min_level) break;
            AstNode n;
            n.kind = NodeKind::BinaryOp;
            n.text = std::string(text());
            n.span_first = lhs->span_first;
            next();
            auto rhs = parse_binary(level + 1);
            if (!rhs) {
                diag("expected right operand of '" + n.text + "'");
                return lhs;
            }
            n.children.push_back(std::move(*lhs));
            n.children.push_back(std::move(*rhs));
            n.span_last = last_orig();
            lhs = std::move(n);
        }
        return lhs;
    }

    // True when '(' at pos_ opens a type name (cast or sizeof(type)).
    bool paren_opens_type() const {
        if (eof() || text() != "(" || !has(1)) return false;
        std::string_view t = text(1);
        if (tok(1).kind == TokenKind::Keyword) {
            return is_type_keyword(t) || is_qualifier_keyword(t) ||
                   t == "struct" || t == "union" || t == "enum";
        }
        if (tok(1).kind == TokenKind::Identifier) {
            if (!is_known_type(t)) return false;
            // "(size_t)x" is a cast; "(size_t)" followed by an operator is
            // more likely a parenthesized value; accept ')' or '*' next
            return true;
        }
        return false;
    }

    std::optional<AstNode> parse_unary() {
        if (eof()) return std::nullopt;
        std::size_t start = pos_;
        std::string_view t = text();
        if (t == "++" || t == "--" || t == "+" || t == "-" || t == "!" ||
            t == "~" || t == "*" || t == "&") {
            AstNode n;
            n.kind = NodeKind::UnaryOp;
            n.text = std::string(t);
            next();
            auto operand = parse_unary();
            if (!operand) {
                diag("expected operand of unary '" + n.text + "'");
                return std::nullopt;
            }
            n.children.push_back(std::move(*operand));
            make_span(n, start);
            return n;
        }
        if (t == "sizeof") {
            AstNode n;
            n.kind = NodeKind::UnaryOp;
            n.text = "sizeof";
            next();
            if (paren_opens_type()) {
                consume_balanced("(", ")");
            } else {
                auto operand = parse_unary();
                if (operand) n.children.push_back(std::move(*operand));
                else diag("expected operand of sizeof");
            }
            make_span(n, start);
            return n;
        }
        if (paren_opens_type()) {
            AstNode n;
            n.kind = NodeKind::UnaryOp;
            n.text = "cast";
            consume_balanced("(", ")");
            if (!eof() && text() == "{") {
                // compound literal: keep element expressions as children
                parse_initializer_into(n.children);
            } else {
                auto operand = parse_unary();
                if (operand) n.children.push_back(std::move(*operand));
                else diag("expected operand of cast");
            }
            make_span(n, start);
            return n;
        }
        return parse_postfix();
    }

    std::optional<AstNode> parse_postfix() {
        std::size_t start = pos_;
        auto base = parse_primary();
        if (!base) return std::nullopt;
        while (!eof()) {
            std::string_view t = text();
            if (t == "(") {
                AstNode call;
                call.kind = NodeKind::Call;
                call.children.push_back(std::move(*base));
                next();
                if (!eof() && text() != ")") {
                    while (!eof()) {
                        auto arg = parse_assignment();
                        if (arg) call.children.push_back(std::move(*arg));
                        else {
                            diag("expected call argument");
                            break;
                        }
                        if (!accept(",")) break;
                    }
                }
                expect(")", "to close call");
                make_span(call, start);
                base = std::move(call);
            } else if (t == "[") {
                AstNode idx;
                idx.kind = NodeKind::BinaryOp;
                idx.text = "[]";
                idx.children.push_back(std::move(*base));
                next();
                auto sub = parse_expression();
                if (sub) idx.children.push_back(std::move(*sub));
                else diag("expected subscript");
                expect("]", "to close subscript");
                make_span(idx, start);
                base = std::move(idx);
            } else if (t == "." || t == "->") {
                AstNode mem;
                mem.kind = NodeKind::BinaryOp;
                mem.text = std::string(t);
                mem.children.push_back(std::move(*base));
                next();
                if (!eof() && kind() == TokenKind::Identifier) {
                    AstNode field;
                    field.kind = NodeKind::Identifier;
                    field.text = std::string(text());
                    field.span_first = orig(pos_);
                    field.span_last = field.span_first;
                    next();
                    mem.children.push_back(std::move(field));
                } else {
                    diag("expected member name");
                }
                make_span(mem, start);
                base = std::move(mem);
            } else if (t == "++" || t == "--") {
                AstNode post;
                post.kind = NodeKind::UnaryOp;
                post.text = std::string(t);
                next();
                post.children.push_back(std::move(*base));
                make_span(post, start);
                base = std::move(post);
            } else {
                break;
            }
        }
        return base;
    }

    std::optional<AstNode> parse_primary() {
        if (eof()) return std::nullopt;
        std::size_t start = pos_;
        TokenKind k = kind();
        if (k == TokenKind::Identifier || k == TokenKind::Keyword) {
            // treat stray keywords as names only when they cannot start
            // anything else; rejects nonsense early
            if (k == TokenKind::Keyword) return std::nullopt;
            AstNode n;
            n.kind = NodeKind::Identifier;
            n.text = std::string(text());
            next();
            make_span(n, start);
            return n;
        }
        if (k == TokenKind::IntLiteral || k == TokenKind::FloatLiteral ||
            k == TokenKind::CharLiteral) {
            AstNode n;
            n.kind = NodeKind::Literal;
            n.text = std::string(text());
            next();
            make_span(n, start);
            return n;
        }
        if (k == TokenKind::StringLiteral) {
            // adjacent string literals concatenate into one value
            AstNode n;
            n.kind = NodeKind::Literal;
            n.text = std::string(text());
            next();
            while (!eof() && kind() == TokenKind::StringLiteral) {
                n.text += std::string(text());
                next();
            }
            make_span(n, start);
            return n;
        }
        if (text() == "(") {
            next();
            auto inner = parse_expression();
            if (!inner) {
                diag("expected expression after '('");
                return std::nullopt;
            }
            expect(")", "to close parenthesized expression");
            inner->span_first = orig(start);
            inner->span_last = last_orig();
            return inner;
        }
        return std::nullopt;
    }
};

}  // namespace

ParseOutcome parse(const std::vector<Token>& tokens) {
    Parser p(tokens);
    return p.run();
}

}  // namespace styloc
