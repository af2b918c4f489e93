#pragma once

#include <string>
#include <vector>

#include "styloc/sample.hpp"

namespace styloc {

struct CompilerConfig {
    std::vector<std::string> command = {"cc", "-c", "-x", "c"};
    double timeout_seconds = 15.0;
};

CompilerConfig compiler_config_from_command(const std::string& command_line,
                                            double timeout_seconds);

// Throws ExternalToolError if the configured compiler cannot compile a
// trivial translation unit. Run once before processing any samples.
void probe_compiler(const CompilerConfig& config);

struct CompileResult {
    bool ok = false;
    bool timed_out = false;
    std::string diagnostics;  // captured compiler stderr
};

// Compile-only invocation (no linking), so main-less snippets pass.
CompileResult validate_compile(const std::string& code,
                               const CompilerConfig& config);

// Runs validate_compile over a bounded worker pool; sets compiled on each
// sample, adds the timeout flag where the compiler was killed.
void validate_samples(std::vector<CodeSample>& samples,
                      const CompilerConfig& config, int jobs);

}  // namespace styloc
