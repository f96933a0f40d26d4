/*
 * Copyright 2026 The Forgeflow Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "forgeflow/exec/process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>

#include "forgeflow/error.hpp"
#include "forgeflow/util/text.hpp"

extern char** environ;

namespace forgeflow::exec {

namespace {

bool is_executable_file(const std::string& path) {
    std::error_code ec;
    return std::filesystem::is_regular_file(path, ec) && ::access(path.c_str(), X_OK) == 0;
}

void close_fd(int& fd) {
    if (fd >= 0) ::close(fd);
    fd = -1;
}

}  // namespace

std::optional<std::string> find_program(const std::string& program) {
    if (program.empty()) return std::nullopt;
    if (program.find('/') != std::string::npos) {
        if (is_executable_file(program)) return program;
        return std::nullopt;
    }
    const char* path = std::getenv("PATH");
    std::string dirs = path ? path : "/usr/local/bin:/usr/bin:/bin";
    std::size_t start = 0;
    while (start <= dirs.size()) {
        auto end = dirs.find(':', start);
        if (end == std::string::npos) end = dirs.size();
        auto dir = dirs.substr(start, end - start);
        if (dir.empty()) dir = ".";
        auto candidate = dir + "/" + program;
        if (is_executable_file(candidate)) return candidate;
        start = end + 1;
    }
    return std::nullopt;
}

std::shared_ptr<ChildProcess> ChildProcess::spawn(const std::string& program,
                                                  const std::vector<std::string>& args,
                                                  const std::filesystem::path& cwd) {
    auto resolved = find_program(program);
    if (!resolved) throw Error(ErrorCode::SpawnFailure, "executable not found: " + program);

    int out[2], err[2], status_pipe[2];
    if (::pipe2(out, O_CLOEXEC) != 0) throw Error(ErrorCode::SpawnFailure, "pipe failed");
    if (::pipe2(err, O_CLOEXEC) != 0) {
        ::close(out[0]);
        ::close(out[1]);
        throw Error(ErrorCode::SpawnFailure, "pipe failed");
    }
    if (::pipe2(status_pipe, O_CLOEXEC) != 0) {
        for (int fd : {out[0], out[1], err[0], err[1]}) ::close(fd);
        throw Error(ErrorCode::SpawnFailure, "pipe failed");
    }

    std::vector<std::string> argv_storage;
    argv_storage.push_back(program);
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage) argv.push_back(a.data());
    argv.push_back(nullptr);
    std::string cwd_str = cwd.string();

    pid_t pid = ::fork();
    if (pid < 0) {
        for (int fd : {out[0], out[1], err[0], err[1], status_pipe[0], status_pipe[1]}) ::close(fd);
        throw Error(ErrorCode::SpawnFailure, std::string("fork failed: ") + std::strerror(errno));
    }
    if (pid == 0) {
        // Only async-signal-safe calls from here on.
        ::setpgid(0, 0);
        int devnull = ::open("/dev/null", O_RDONLY);
        if (devnull >= 0) ::dup2(devnull, 0);
        ::dup2(out[1], 1);
        ::dup2(err[1], 2);
        int code = 0;
        if (::chdir(cwd_str.c_str()) != 0) {
            code = errno;
        } else {
            ::execve(resolved->c_str(), argv.data(), environ);
            code = errno;
        }
        (void)!::write(status_pipe[1], &code, sizeof code);
        ::_exit(127);
    }
    ::setpgid(pid, pid);  // close the race with the child's own setpgid
    ::close(out[1]);
    ::close(err[1]);
    ::close(status_pipe[1]);

    int child_errno = 0;
    ssize_t n;
    do {
        n = ::read(status_pipe[0], &child_errno, sizeof child_errno);
    } while (n < 0 && errno == EINTR);
    ::close(status_pipe[0]);
    if (n == static_cast<ssize_t>(sizeof child_errno)) {
        int st;
        ::waitpid(pid, &st, 0);
        ::close(out[0]);
        ::close(err[0]);
        throw Error(ErrorCode::SpawnFailure,
                    "cannot execute " + program + ": " + std::strerror(child_errno));
    }
    return std::shared_ptr<ChildProcess>(new ChildProcess(pid, out[0], err[0]));
}

ChildProcess::~ChildProcess() {
    close_fd(out_fd_);
    close_fd(err_fd_);
    if (!reaped()) {
        kill_hard();
        wait();
    }
}

void ChildProcess::pump(const ChunkSink& on_chunk, const LineSink& on_line) {
    std::string pending[2];
    char buf[8192];
    while (out_fd_ >= 0 || err_fd_ >= 0) {
        pollfd fds[2];
        int nfds = 0;
        int* owners[2];
        OutputStream streams[2];
        if (out_fd_ >= 0) {
            fds[nfds] = {out_fd_, POLLIN, 0};
            owners[nfds] = &out_fd_;
            streams[nfds++] = OutputStream::Stdout;
        }
        if (err_fd_ >= 0) {
            fds[nfds] = {err_fd_, POLLIN, 0};
            owners[nfds] = &err_fd_;
            streams[nfds++] = OutputStream::Stderr;
        }
        int rc = ::poll(fds, static_cast<nfds_t>(nfds), -1);
        if (rc < 0) {
            if (errno == EINTR) continue;
            break;
        }
        // One descriptor per wakeup, stdout first, so output a child writes
        // to stdout before stderr is never reported after it.
        for (int i = 0; i < nfds; ++i) {
            if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
            if (i > 0 && (fds[0].revents & (POLLIN | POLLHUP | POLLERR))) break;
            auto stream = streams[i];
            auto& line_buf = pending[stream == OutputStream::Stdout ? 0 : 1];
            ssize_t n = ::read(fds[i].fd, buf, sizeof buf);
            if (n < 0 && errno == EINTR) continue;
            if (n <= 0) {
                if (!line_buf.empty()) {
                    on_line(stream, line_buf);
                    line_buf.clear();
                }
                close_fd(*owners[i]);
                continue;
            }
            std::string_view chunk(buf, static_cast<std::size_t>(n));
            on_chunk(stream, chunk);
            line_buf.append(chunk);
            std::size_t start = 0;
            for (auto nl = line_buf.find('\n'); nl != std::string::npos; nl = line_buf.find('\n', start)) {
                on_line(stream, std::string_view(line_buf).substr(start, nl - start));
                start = nl + 1;
            }
            line_buf.erase(0, start);
        }
    }
}

int ChildProcess::wait() {
    {
        std::lock_guard lock(mutex_);
        if (exit_code_) return *exit_code_;
    }
    // Wait without reaping: while the child is a zombie its pid (and so the
    // group id) cannot be recycled, so stragglers can be killed safely.
    siginfo_t info{};
    int r;
    do {
        r = ::waitid(P_PID, static_cast<id_t>(pid_), &info, WEXITED | WNOWAIT);
    } while (r < 0 && errno == EINTR);

    std::lock_guard lock(mutex_);
    if (exit_code_) return *exit_code_;
    ::kill(-pid_, SIGKILL);
    int status = 0;
    pid_t reaped_pid;
    do {
        reaped_pid = ::waitpid(pid_, &status, 0);
    } while (reaped_pid < 0 && errno == EINTR);
    int code = 255;
    if (reaped_pid >= 0 && WIFEXITED(status)) code = WEXITSTATUS(status);
    else if (reaped_pid >= 0 && WIFSIGNALED(status)) code = 128 + WTERMSIG(status);
    exit_code_ = code;
    return code;
}

void ChildProcess::signal_group(int sig) {
    std::lock_guard lock(mutex_);
    if (exit_code_) return;  // pid may already be recycled
    ::kill(-pid_, sig);
}

void ChildProcess::terminate() { signal_group(SIGTERM); }
void ChildProcess::kill_hard() { signal_group(SIGKILL); }

bool ChildProcess::reaped() const {
    std::lock_guard lock(mutex_);
    return exit_code_.has_value();
}

}  // namespace forgeflow::exec
