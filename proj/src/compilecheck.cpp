#include "styloc/compilecheck.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <sstream>
#include <thread>

#include "styloc/ioutil.hpp"

namespace styloc {

CompilerConfig compiler_config_from_command(const std::string& command_line,
                                            double timeout_seconds) {
    CompilerConfig cfg;
    cfg.command.clear();
    std::istringstream in(command_line);
    std::string word;
    while (in >> word) cfg.command.push_back(word);
    if (cfg.command.empty()) {
        throw UsageError("compiler command is empty");
    }
    cfg.timeout_seconds = timeout_seconds;
    return cfg;
}

namespace {

struct RunResult {
    int exit_code = -1;
    bool timed_out = false;
    std::string output;
};

RunResult run_with_timeout(const std::vector<std::string>& argv,
                           double timeout_seconds) {
    int pipefd[2];
    if (pipe(pipefd) != 0) {
        throw ExternalToolError("pipe() failed");
    }
    pid_t pid = fork();
    if (pid < 0) {
        close(pipefd[0]);
        close(pipefd[1]);
        throw ExternalToolError("fork() failed");
    }
    if (pid == 0) {
        close(pipefd[0]);
        dup2(pipefd[1], STDOUT_FILENO);
        dup2(pipefd[1], STDERR_FILENO);
        close(pipefd[1]);
        std::vector<char*> cargv;
        cargv.reserve(argv.size() + 1);
        for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
        cargv.push_back(nullptr);
        execvp(cargv[0], cargv.data());
        _exit(127);
    }
    close(pipefd[1]);

    RunResult res;
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration<double>(timeout_seconds);
    char buf[4096];
    bool open = true;
    while (open) {
        auto now = std::chrono::steady_clock::now();
        long remaining_ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline -
                                                                  now)
                .count();
        if (remaining_ms <= 0) {
            res.timed_out = true;
            kill(pid, SIGKILL);
            break;
        }
        struct pollfd pfd = {pipefd[0], POLLIN, 0};
        int rv = poll(&pfd, 1, static_cast<int>(
                                   std::min(remaining_ms, 200L)));
        if (rv > 0) {
            ssize_t got = read(pipefd[0], buf, sizeof(buf));
            if (got <= 0) {
                open = false;
            } else if (res.output.size() < 65536) {
                res.output.append(buf, static_cast<std::size_t>(got));
            }
        }
    }
    close(pipefd[0]);
    int status = 0;
    waitpid(pid, &status, 0);
    if (!res.timed_out && WIFEXITED(status)) {
        res.exit_code = WEXITSTATUS(status);
    }
    return res;
}

std::filesystem::path scratch_dir() {
    auto dir = std::filesystem::temp_directory_path() /
               ("styloc-compile-" + std::to_string(getpid()));
    std::filesystem::create_directories(dir);
    return dir;
}

CompileResult compile_one(const std::string& code,
                          const CompilerConfig& config,
                          const std::string& tag) {
    auto dir = scratch_dir();
    auto src = dir / ("sample_" + tag + ".c");
    auto obj = dir / ("sample_" + tag + ".o");
    write_file(src, code);

    std::vector<std::string> argv = config.command;
    argv.push_back(src.string());
    argv.push_back("-o");
    argv.push_back(obj.string());

    RunResult run = run_with_timeout(argv, config.timeout_seconds);
    std::error_code ec;
    std::filesystem::remove(src, ec);
    std::filesystem::remove(obj, ec);

    CompileResult out;
    out.timed_out = run.timed_out;
    out.ok = !run.timed_out && run.exit_code == 0;
    out.diagnostics = std::move(run.output);
    return out;
}

}  // namespace

void probe_compiler(const CompilerConfig& config) {
    CompileResult r = compile_one("int styloc_probe(int x){return x;}\n",
                                  config, "probe");
    if (!r.ok) {
        throw ExternalToolError(
            "compiler probe failed for '" + config.command[0] +
            "': " + (r.timed_out ? "timed out" : r.diagnostics));
    }
}

CompileResult validate_compile(const std::string& code,
                               const CompilerConfig& config) {
    return compile_one(code, config, "single");
}

void validate_samples(std::vector<CodeSample>& samples,
                      const CompilerConfig& config, int jobs) {
    probe_compiler(config);
    if (jobs < 1) jobs = 1;
    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = cursor.fetch_add(1);
            if (i >= samples.size()) return;
            CompileResult r =
                compile_one(samples[i].code, config, std::to_string(i));
            samples[i].compiled = r.ok;
            if (r.timed_out) samples[i].flags.insert(flags::kTimeout);
        }
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

}  // namespace styloc
