#include "styloc/features.hpp"

#include <algorithm>
#include <cmath>

#include "styloc/ioutil.hpp"

namespace styloc {

namespace {

constexpr int kScalarCount = 13;

const char* kScalarNames[kScalarCount] = {
    "dmax", "cc",   "params", "loc",      "vars",         "returns", "h_n1",
    "h_n2", "h_N1", "h_N2",   "h_volume", "h_difficulty", "h_effort"};

double scalar_of(const FunctionMetrics& m, int idx) {
    switch (idx) {
        case 0: return m.max_nesting_depth;
        case 1: return m.cyclomatic_complexity;
        case 2: return m.param_count;
        case 3: return m.loc;
        case 4: return m.var_complexity;
        case 5: return m.return_count;
        case 6: return static_cast<double>(m.halstead.n1);
        case 7: return static_cast<double>(m.halstead.n2);
        case 8: return static_cast<double>(m.halstead.N1);
        case 9: return static_cast<double>(m.halstead.N2);
        case 10: return m.halstead.volume;
        case 11: return m.halstead.difficulty;
        case 12: return m.halstead.effort;
    }
    return 0.0;
}

// Frozen with layout v1: the 50 most frequent parent->child pairs over the
// bundled fixture corpus, ties broken by kind index. Regenerating requires a
// layout version bump.
const BigramKey kBigramVocabV1[50] = {
    {21, 25},  // BinaryOp>Identifier
    {2, 3},    // ParamList>Param
    {21, 26},  // BinaryOp>Literal
    {4, 19},   // CompoundStmt>ExprStmt
    {5, 25},   // Decl>Identifier
    {4, 14},   // CompoundStmt>Return
    {5, 26},   // Decl>Literal
    {1, 2},    // FunctionDef>ParamList
    {1, 4},    // FunctionDef>CompoundStmt
    {19, 24},  // ExprStmt>AssignOp
    {22, 25},  // UnaryOp>Identifier
    {24, 25},  // AssignOp>Identifier
    {21, 21},  // BinaryOp>BinaryOp
    {4, 5},    // CompoundStmt>Decl
    {6, 4},    // If>CompoundStmt
    {20, 25},  // Call>Identifier
    {4, 6},    // CompoundStmt>If
    {6, 21},   // If>BinaryOp
    {14, 25},  // Return>Identifier
    {14, 26},  // Return>Literal
    {24, 21},  // AssignOp>BinaryOp
    {24, 22},  // AssignOp>UnaryOp
    {4, 8},    // CompoundStmt>For
    {8, 4},    // For>CompoundStmt
    {8, 5},    // For>Decl
    {8, 21},   // For>BinaryOp
    {8, 22},   // For>UnaryOp
    {24, 26},  // AssignOp>Literal
    {14, 21},  // Return>BinaryOp
    {21, 22},  // BinaryOp>UnaryOp
    {5, 21},   // Decl>BinaryOp
    {14, 22},  // Return>UnaryOp
    {19, 22},  // ExprStmt>UnaryOp
    {20, 26},  // Call>Literal
    {22, 21},  // UnaryOp>BinaryOp
    {23, 21},  // Ternary>BinaryOp
    {23, 25},  // Ternary>Identifier
    {4, 4},    // CompoundStmt>CompoundStmt
    {4, 9},    // CompoundStmt>While
    {4, 12},   // CompoundStmt>Case
    {6, 7},    // If>Else
    {9, 4},    // While>CompoundStmt
    {12, 14},  // Case>Return
    {12, 26},  // Case>Literal
    {19, 20},  // ExprStmt>Call
    {4, 17},   // CompoundStmt>Goto
    {4, 18},   // CompoundStmt>Label
    {7, 4},    // Else>CompoundStmt
    {9, 21},   // While>BinaryOp
    {20, 21},  // Call>BinaryOp
};

}  // namespace

const std::vector<BigramKey>& bigram_vocab_v1() {
    static const std::vector<BigramKey> vocab(std::begin(kBigramVocabV1),
                                              std::end(kBigramVocabV1));
    return vocab;
}

const std::vector<std::string>& feature_names_v1() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n = {
            "file.chars", "file.lines", "file.functions",
            "file.comment_char_ratio", "file.comment_lines"};
        for (int s = 0; s < kScalarCount; ++s) {
            for (const char* agg : {"mean", "max", "sum"}) {
                n.push_back(std::string("fn.") + kScalarNames[s] + "." + agg);
            }
        }
        for (int k = 0; k < kNodeKindCount; ++k) {
            n.push_back(std::string("tf.") +
                        node_kind_name(static_cast<NodeKind>(k)));
        }
        for (const auto& [a, b] : bigram_vocab_v1()) {
            n.push_back(std::string("bigram.") +
                        node_kind_name(static_cast<NodeKind>(a)) + "__" +
                        node_kind_name(static_cast<NodeKind>(b)));
        }
        return n;
    }();
    return names;
}

FeatureExtraction extract_features(std::string_view source,
                                   bool with_comments) {
    FeatureExtraction out;
    std::string stripped;
    std::string_view effective = source;
    if (!with_comments) {
        stripped = strip_comments(source);
        effective = stripped;
    }

    std::vector<Token> tokens = tokenize(effective);
    ParseOutcome parsed = parse(tokens);
    out.parsed_fully = parsed.parsed_fully;
    if (!parsed.diagnostics.empty()) {
        const Diagnostic& d = parsed.diagnostics.front();
        out.first_diagnostic =
            "line " + std::to_string(d.line) + ": " + d.message;
    }

    FileMetrics fm = file_metrics(effective, tokens, parsed.ast);
    std::vector<const AstNode*> fns = functions_of(parsed.ast);
    out.has_functions = !fns.empty();

    std::vector<FunctionMetrics> fms;
    fms.reserve(fns.size());
    for (const AstNode* f : fns) fms.push_back(function_metrics(*f, tokens));

    FeatureVector& fv = out.vector;
    fv.layout_version = kFeatureLayoutVersion;
    fv.names = feature_names_v1();
    fv.values.reserve(fv.names.size());

    fv.values.push_back(static_cast<double>(fm.char_count));
    fv.values.push_back(static_cast<double>(fm.line_count));
    fv.values.push_back(static_cast<double>(fm.function_count));
    fv.values.push_back(with_comments ? fm.comment_char_ratio : 0.0);
    fv.values.push_back(
        with_comments ? static_cast<double>(fm.comment_line_count) : 0.0);

    const double k = static_cast<double>(fms.size());
    for (int s = 0; s < kScalarCount; ++s) {
        double sum = 0.0, mx = 0.0;
        for (const auto& m : fms) {
            double v = scalar_of(m, s);
            sum += v;
            mx = std::max(mx, v);
        }
        fv.values.push_back(k > 0 ? sum / k : 0.0);
        fv.values.push_back(mx);
        fv.values.push_back(sum);
    }

    std::array<std::size_t, kNodeKindCount> pooled_counts{};
    std::map<BigramKey, std::size_t> pooled_bigrams;
    std::size_t pooled_total = 0;
    for (const auto& m : fms) {
        pooled_total += m.node_count;
        for (int i = 0; i < kNodeKindCount; ++i) {
            pooled_counts[i] += m.node_counts[i];
        }
        for (const auto& [key, c] : m.bigram_counts) {
            pooled_bigrams[key] += c;
        }
    }
    for (int i = 0; i < kNodeKindCount; ++i) {
        fv.values.push_back(pooled_total > 0
                                ? static_cast<double>(pooled_counts[i]) /
                                      static_cast<double>(pooled_total)
                                : 0.0);
    }
    for (const auto& key : bigram_vocab_v1()) {
        auto it = pooled_bigrams.find(key);
        double c = it == pooled_bigrams.end()
                       ? 0.0
                       : static_cast<double>(it->second);
        fv.values.push_back(pooled_total > 0
                                ? c / static_cast<double>(pooled_total)
                                : 0.0);
    }
    return out;
}

FeatureVector feature_vector(std::string_view source, bool with_comments,
                             bool tolerant) {
    FeatureExtraction ex = extract_features(source, with_comments);
    if (!ex.parsed_fully && !tolerant) {
        throw DataError("sample does not parse: " + ex.first_diagnostic);
    }
    return std::move(ex.vector);
}

std::string feature_csv(const FeatureTable& table) {
    std::string out = "id,label";
    for (const auto& n : table.names) {
        out += ',';
        out += csv_escape(n);
    }
    out += '\n';
    for (const auto& row : table.rows) {
        out += csv_escape(row.id);
        out += ',';
        out += csv_escape(row.label);
        for (double v : row.values) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

FeatureTable parse_feature_csv(std::string_view csv) {
    FeatureTable table;
    std::size_t pos = 0;
    bool header = true;
    while (pos < csv.size()) {
        std::size_t end = csv.find('\n', pos);
        if (end == std::string_view::npos) end = csv.size();
        std::string_view line = csv.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos = end + 1;
        if (line.empty()) continue;
        std::vector<std::string> fields = csv_split_line(line);
        if (header) {
            if (fields.size() < 2 || fields[0] != "id" || fields[1] != "label") {
                throw DataError("feature CSV must start with id,label header");
            }
            table.names.assign(fields.begin() + 2, fields.end());
            header = false;
            continue;
        }
        if (fields.size() != table.names.size() + 2) {
            throw DataError("feature CSV row width mismatch: " +
                            std::string(line.substr(0, 40)));
        }
        FeatureRow row;
        row.id = fields[0];
        row.label = fields[1];
        row.values.reserve(fields.size() - 2);
        for (std::size_t i = 2; i < fields.size(); ++i) {
            row.values.push_back(std::stod(fields[i]));
        }
        table.rows.push_back(std::move(row));
    }
    if (header) throw DataError("feature CSV is empty");
    return table;
}

}  // namespace styloc
