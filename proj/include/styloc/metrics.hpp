#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string_view>
#include <vector>

#include "styloc/ast.hpp"
#include "styloc/token.hpp"

namespace styloc {

struct FileMetrics {
    std::size_t char_count = 0;
    std::size_t line_count = 0;
    std::size_t function_count = 0;
    double comment_char_ratio = 0.0;
    std::size_t comment_line_count = 0;
};

struct HalsteadMetrics {
    std::size_t n1 = 0;  // distinct operators
    std::size_t n2 = 0;  // distinct operands
    std::size_t N1 = 0;  // total operators
    std::size_t N2 = 0;  // total operands
    double volume = 0.0;
    double difficulty = 0.0;
    double effort = 0.0;
};

using BigramKey = std::pair<int, int>;  // (parent kind, child kind)

struct FunctionMetrics {
    int max_nesting_depth = 0;
    int cyclomatic_complexity = 1;
    int param_count = 0;
    int loc = 0;
    int var_complexity = 0;
    int return_count = 0;
    std::size_t node_count = 0;
    std::array<std::size_t, kNodeKindCount> node_counts{};
    std::map<BigramKey, std::size_t> bigram_counts;
    std::array<double, kNodeKindCount> node_tf{};
    std::map<BigramKey, double> bigram_tf;
    HalsteadMetrics halstead;
};

FileMetrics file_metrics(std::string_view source,
                         const std::vector<Token>& tokens,
                         const AstNode& root);

int max_nesting_depth(const AstNode& fn);
int cyclomatic_complexity(const AstNode& fn);

// node_tf(t) = M(t)/N over the whole FunctionDef subtree; bigram_tf on
// parent->child pairs with the same denominator.
void ast_frequencies(const AstNode& fn,
                     std::array<double, kNodeKindCount>& node_tf,
                     std::map<BigramKey, double>& bigram_tf);

// Operator/operand classification is token-text based; the normative table
// lives in halstead_operator_keywords()/halstead_excluded_delimiters().
HalsteadMetrics halstead(const AstNode& fn, const std::vector<Token>& tokens);

FunctionMetrics function_metrics(const AstNode& fn,
                                 const std::vector<Token>& tokens);

const std::vector<std::string_view>& halstead_operator_keywords();
const std::vector<std::string_view>& halstead_excluded_delimiters();

}  // namespace styloc
