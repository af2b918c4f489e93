#include "styloc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace styloc {

namespace {

std::size_t count_lines(std::string_view s) {
    if (s.empty()) return 0;
    std::size_t n = static_cast<std::size_t>(
        std::count(s.begin(), s.end(), '\n'));
    if (s.back() != '\n') ++n;
    return n;
}

bool is_control_kind(NodeKind k) {
    return k == NodeKind::If || k == NodeKind::Else || k == NodeKind::For ||
           k == NodeKind::While || k == NodeKind::DoWhile ||
           k == NodeKind::Switch;
}

bool is_decision_kind(NodeKind k) {
    return k == NodeKind::If || k == NodeKind::For || k == NodeKind::While ||
           k == NodeKind::DoWhile || k == NodeKind::Ternary ||
           k == NodeKind::Case;
}

void walk_depth(const AstNode& n, int depth, int& best) {
    if (is_control_kind(n.kind)) ++depth;
    best = std::max(best, depth);
    for (const AstNode& c : n.children) walk_depth(c, depth, best);
}

void count_kind(const AstNode& n, NodeKind k, std::size_t& total) {
    if (n.kind == k) ++total;
    for (const AstNode& c : n.children) count_kind(c, k, total);
}

const AstNode* body_of(const AstNode& fn) {
    for (const AstNode& c : fn.children) {
        if (c.kind == NodeKind::CompoundStmt) return &c;
    }
    return nullptr;
}

const AstNode* params_of(const AstNode& fn) {
    for (const AstNode& c : fn.children) {
        if (c.kind == NodeKind::ParamList) return &c;
    }
    return nullptr;
}

void collect_decl_names(const AstNode& n, std::set<std::string>& names) {
    if (n.kind == NodeKind::Decl) {
        for (const auto& name : n.decl_names) names.insert(name);
    }
    for (const AstNode& c : n.children) collect_decl_names(c, names);
}

void count_nodes_and_bigrams(const AstNode& n,
                             std::array<std::size_t, kNodeKindCount>& counts,
                             std::map<BigramKey, std::size_t>& bigrams) {
    ++counts[static_cast<int>(n.kind)];
    for (const AstNode& c : n.children) {
        ++bigrams[{static_cast<int>(n.kind), static_cast<int>(c.kind)}];
        count_nodes_and_bigrams(c, counts, bigrams);
    }
}

}  // namespace

const std::vector<std::string_view>& halstead_operator_keywords() {
    static const std::vector<std::string_view> kw = {
        "if",     "else", "for",    "while", "do",       "switch",
        "case",   "return", "sizeof", "goto",  "break",    "continue"};
    return kw;
}

const std::vector<std::string_view>& halstead_excluded_delimiters() {
    static const std::vector<std::string_view> d = {",", ";", "(",
                                                    ")", "{", "}"};
    return d;
}

FileMetrics file_metrics(std::string_view source,
                         const std::vector<Token>& tokens,
                         const AstNode& root) {
    FileMetrics fm;
    fm.char_count = source.size();
    fm.line_count = count_lines(source);
    fm.function_count = functions_of(root).size();

    std::size_t comment_chars = 0;
    std::set<int> comment_lines;
    for (const Token& t : tokens) {
        if (t.kind != TokenKind::Comment) continue;
        comment_chars += t.text.size();
        int span_lines = static_cast<int>(
            std::count(t.text.begin(), t.text.end(), '\n'));
        for (int l = t.line; l <= t.line + span_lines; ++l) {
            comment_lines.insert(l);
        }
    }
    fm.comment_char_ratio =
        fm.char_count == 0
            ? 0.0
            : static_cast<double>(comment_chars) /
                  static_cast<double>(fm.char_count);
    fm.comment_line_count = comment_lines.size();
    return fm;
}

int max_nesting_depth(const AstNode& fn) {
    int best = 0;
    walk_depth(fn, 0, best);
    return best;
}

int cyclomatic_complexity(const AstNode& fn) {
    std::size_t decisions = 0;
    std::vector<const AstNode*> stack = {&fn};
    while (!stack.empty()) {
        const AstNode* n = stack.back();
        stack.pop_back();
        if (is_decision_kind(n->kind)) ++decisions;
        for (const AstNode& c : n->children) stack.push_back(&c);
    }
    return 1 + static_cast<int>(decisions);
}

void ast_frequencies(const AstNode& fn,
                     std::array<double, kNodeKindCount>& node_tf,
                     std::map<BigramKey, double>& bigram_tf) {
    std::array<std::size_t, kNodeKindCount> counts{};
    std::map<BigramKey, std::size_t> bigrams;
    count_nodes_and_bigrams(fn, counts, bigrams);
    std::size_t total = 0;
    for (std::size_t c : counts) total += c;
    node_tf.fill(0.0);
    bigram_tf.clear();
    if (total == 0) return;
    for (int i = 0; i < kNodeKindCount; ++i) {
        node_tf[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    }
    for (const auto& [key, c] : bigrams) {
        bigram_tf[key] = static_cast<double>(c) / static_cast<double>(total);
    }
}

HalsteadMetrics halstead(const AstNode& fn, const std::vector<Token>& tokens) {
    HalsteadMetrics h;
    std::unordered_map<std::string, std::size_t> operators;
    std::unordered_map<std::string, std::size_t> operands;

    static const std::unordered_set<std::string_view> excluded(
        halstead_excluded_delimiters().begin(),
        halstead_excluded_delimiters().end());
    static const std::unordered_set<std::string_view> op_keywords(
        halstead_operator_keywords().begin(),
        halstead_operator_keywords().end());

    if (fn.span_first >= 0 && fn.span_last >= fn.span_first) {
        for (int i = fn.span_first;
             i <= fn.span_last && i < static_cast<int>(tokens.size()); ++i) {
            const Token& t = tokens[i];
            switch (t.kind) {
                case TokenKind::Identifier:
                case TokenKind::IntLiteral:
                case TokenKind::FloatLiteral:
                case TokenKind::CharLiteral:
                case TokenKind::StringLiteral:
                    ++operands[t.text];
                    break;
                case TokenKind::Operator:
                case TokenKind::Punctuator:
                    if (!excluded.count(t.text)) ++operators[t.text];
                    break;
                case TokenKind::Keyword:
                    if (op_keywords.count(t.text)) ++operators[t.text];
                    break;
                default:
                    break;
            }
        }
    }
    std::size_t calls = 0;
    count_kind(fn, NodeKind::Call, calls);
    if (calls > 0) operators["call"] += calls;

    h.n1 = operators.size();
    h.n2 = operands.size();
    for (const auto& [_, c] : operators) h.N1 += c;
    for (const auto& [_, c] : operands) h.N2 += c;

    const double vocab = static_cast<double>(h.n1 + h.n2);
    h.volume = vocab > 0.0
                   ? static_cast<double>(h.N1 + h.N2) * std::log2(vocab)
                   : 0.0;
    h.difficulty = h.n2 > 0
                       ? (static_cast<double>(h.n1) / 2.0) *
                             (static_cast<double>(h.N2) /
                              static_cast<double>(h.n2))
                       : 0.0;
    h.effort = h.difficulty * h.volume;
    return h;
}

FunctionMetrics function_metrics(const AstNode& fn,
                                 const std::vector<Token>& tokens) {
    FunctionMetrics m;
    m.max_nesting_depth = max_nesting_depth(fn);
    m.cyclomatic_complexity = cyclomatic_complexity(fn);

    const AstNode* params = params_of(fn);
    m.param_count =
        params ? static_cast<int>(params->children.size()) : 0;

    const AstNode* body = body_of(fn);
    if (body) {
        std::set<std::string> vars;
        collect_decl_names(*body, vars);
        m.var_complexity = static_cast<int>(vars.size());

        std::size_t returns = 0;
        count_kind(*body, NodeKind::Return, returns);
        m.return_count = static_cast<int>(returns);

        // executable lines: any line holding a body token other than
        // braces, comments and preprocessor directives
        std::set<int> lines;
        if (body->span_first >= 0) {
            for (int i = body->span_first;
                 i <= body->span_last && i < static_cast<int>(tokens.size());
                 ++i) {
                const Token& t = tokens[i];
                if (t.kind == TokenKind::Comment ||
                    t.kind == TokenKind::PreprocessorLine)
                    continue;
                if (t.text == "{" || t.text == "}") continue;
                lines.insert(t.line);
            }
        }
        m.loc = static_cast<int>(lines.size());
    }

    count_nodes_and_bigrams(fn, m.node_counts, m.bigram_counts);
    for (std::size_t c : m.node_counts) m.node_count += c;
    if (m.node_count > 0) {
        for (int i = 0; i < kNodeKindCount; ++i) {
            m.node_tf[i] = static_cast<double>(m.node_counts[i]) /
                           static_cast<double>(m.node_count);
        }
        for (const auto& [key, c] : m.bigram_counts) {
            m.bigram_tf[key] =
                static_cast<double>(c) / static_cast<double>(m.node_count);
        }
    }
    m.halstead = halstead(fn, tokens);
    return m;
}

}  // namespace styloc
