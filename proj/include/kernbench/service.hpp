#pragma once

#include "kernbench/machine.hpp"

#include <memory>
#include <string>

namespace kernbench {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    /// 0 picks a free port.
    int port = 8091;
    /// Flat directory of .kbr files plus index.tsv.
    std::string report_dir = "reports";
    std::string sampler;
    MachineSpec machine = default_machine();
    /// Static files served under /; empty disables static hosting.
    std::string webui_dir;
};

/// HTTP API over the experiment and report pipeline. Jobs run one at a time in
/// submission order on a single worker thread.
class Service {
public:
    explicit Service(ServiceConfig config);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds and starts serving in the background. Throws Error{Io} when the port is taken.
    void start();
    /// Port actually bound (useful with port 0).
    int port() const;
    /// Blocks until stop() is called from another thread or the server fails.
    void wait();
    void stop();

    /// Blocks until the job queue is empty and the worker is idle.
    void drain();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace kernbench
