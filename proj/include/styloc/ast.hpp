#pragma once

#include <string>
#include <vector>

#include "styloc/token.hpp"

namespace styloc {

// Fixed node taxonomy; feature layouts embed kAstTaxonomyVersion so vectors
// from different taxonomy revisions can never be mixed.
enum class NodeKind : int {
    TranslationUnit = 0,
    FunctionDef,
    ParamList,
    Param,
    CompoundStmt,
    Decl,
    If,
    Else,
    For,
    While,
    DoWhile,
    Switch,
    Case,
    Default,
    Return,
    Break,
    Continue,
    Goto,
    Label,
    ExprStmt,
    Call,
    BinaryOp,
    UnaryOp,
    Ternary,
    AssignOp,
    Identifier,
    Literal,
};

inline constexpr int kNodeKindCount = 27;
inline constexpr int kAstTaxonomyVersion = 1;

const char* node_kind_name(NodeKind k);
// Returns -1 for unknown names.
int node_kind_from_name(std::string_view name);

struct AstNode {
    NodeKind kind;
    std::vector<AstNode> children;
    int span_first = -1;  // token indices into the tokenize() output
    int span_last = -1;
    // role-dependent payload: operator spelling for BinaryOp/UnaryOp/AssignOp,
    // name for FunctionDef/Identifier/Param/Goto/Label, spelling for Literal
    std::string text;
    std::vector<std::string> decl_names;  // Decl: names introduced

    bool operator==(const AstNode& o) const {
        return kind == o.kind && span_first == o.span_first &&
               span_last == o.span_last && text == o.text &&
               decl_names == o.decl_names && children == o.children;
    }
};

struct Diagnostic {
    int line;
    std::string message;
};

struct ParseOutcome {
    bool has_ast = false;
    AstNode ast;  // root is TranslationUnit when has_ast
    std::vector<Diagnostic> diagnostics;
    bool parsed_fully = false;
};

// Tolerant recursive-descent parse of a C99 statement/expression subset.
// Never throws; trouble is reported through diagnostics and the offending
// region is skipped to the next ';' or matching '}'.
ParseOutcome parse(const std::vector<Token>& tokens);

// FunctionDef children of the root, in source order.
std::vector<const AstNode*> functions_of(const AstNode& root);

// Total number of nodes in the subtree rooted at n (inclusive).
std::size_t subtree_size(const AstNode& n);

}  // namespace styloc
