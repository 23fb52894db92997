#include "kernbench/service.hpp"

#include "kernbench/error.hpp"
#include "kernbench/experiment.hpp"
#include "kernbench/kernels.hpp"
#include "kernbench/metrics.hpp"
#include "kernbench/report.hpp"
#include "kernbench/submit.hpp"

#include <httplib.h>
#include <json.hpp>

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace kernbench {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

enum class JobState { Queued, Running, Done, Failed };

const char* to_string(JobState s) {
    switch (s) {
        case JobState::Queued: return "queued";
        case JobState::Running: return "running";
        case JobState::Done: return "done";
        case JobState::Failed: return "failed";
    }
    return "?";
}

struct JobRecord {
    std::string id;
    std::string experiment_text;
    JobState state = JobState::Queued;
    std::string report_id;
    std::vector<std::string> diagnostics;
};

json job_json(const JobRecord& j) {
    json o = {{"id", j.id}, {"state", to_string(j.state)}, {"diagnostics", j.diagnostics}};
    o["report_id"] = j.report_id.empty() ? json(nullptr) : json(j.report_id);
    return o;
}

json shape_rule_json(const ShapeRule& r) { return r.text(); }

json signature_json(const Signature& s) {
    json args = json::array();
    for (const auto& a : s.args) {
        json o = {{"name", a.name}, {"kind", kind_name(a.kind)}};
        std::visit(
            [&](const auto& k) {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, FlagArg>) {
                    o["allowed"] = k.allowed;
                } else if constexpr (std::is_same_v<T, DimArg>) {
                    o["min"] = k.min_value;
                } else if constexpr (std::is_same_v<T, LdArg>) {
                    o["serves"] = k.serves;
                } else if constexpr (std::is_same_v<T, DataArg>) {
                    o["rows"] = shape_rule_json(k.rows);
                    o["cols"] = shape_rule_json(k.cols);
                    o["structure"] = to_string(k.structure);
                    o["ld"] = k.ld;
                    if (!k.uplo_flag.empty()) o["uplo_flag"] = k.uplo_flag;
                }
            },
            a.kind);
        args.push_back(std::move(o));
    }
    return {{"name", s.name},   {"dtype", to_string(s.dtype)}, {"description", s.description},
            {"flops", s.flops.text}, {"args", std::move(args)}};
}

json error_json(const std::string& message, const std::vector<std::string>& diags = {}) {
    return {{"error", message}, {"diagnostics", diags}};
}

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

bool truthy(const std::string& v) { return v == "1" || v == "true" || v == "yes" || v == "on"; }

}  // namespace

struct Service::Impl {
    ServiceConfig config;
    httplib::Server server;
    std::thread listener;
    int bound_port = 0;

    std::mutex mutex;
    std::condition_variable cv;
    std::condition_variable idle_cv;
    std::deque<std::string> queue;
    std::map<std::string, JobRecord> jobs;
    std::vector<std::pair<std::string, std::string>> index;  // (report id, file name)
    std::map<std::string, std::shared_ptr<const Report>> cache;
    std::size_t next_job = 1;
    std::size_t next_report = 1;
    bool busy = false;
    bool stopping = false;
    std::thread worker;

    explicit Impl(ServiceConfig c) : config(std::move(c)) {}

    fs::path index_path() const { return fs::path(config.report_dir) / "index.tsv"; }

    void load_index() {
        fs::create_directories(config.report_dir);
        std::ifstream in(index_path());
        for (std::string line; std::getline(in, line);) {
            auto tab = line.find('\t');
            if (tab == std::string::npos) continue;
            index.emplace_back(line.substr(0, tab), line.substr(tab + 1));
        }
        for (const auto& [id, file] : index)
            if (id.size() > 1 && id[0] == 'r') next_report = std::max(next_report, std::stoul(id.substr(1)) + 1);
    }

    /// Requires `mutex`.
    std::string store_report(const std::string& text) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "r%04zu", next_report++);
        const std::string id = buf, file = id + ".kbr";
        const fs::path tmp = fs::path(config.report_dir) / (file + ".tmp");
        {
            std::ofstream out(tmp, std::ios::binary);
            out << text;
            if (!out) throw Error(ErrorCode::Io, "cannot write report " + file);
        }
        fs::rename(tmp, fs::path(config.report_dir) / file);
        index.emplace_back(id, file);
        std::ofstream idx(index_path(), std::ios::app);
        idx << id << '\t' << file << '\n';
        return id;
    }

    std::shared_ptr<const Report> report(const std::string& id) {
        std::string file;
        {
            std::lock_guard lock(mutex);
            if (auto it = cache.find(id); it != cache.end()) return it->second;
            for (const auto& [rid, f] : index)
                if (rid == id) file = f;
        }
        if (file.empty()) return nullptr;
        auto r = std::make_shared<const Report>(load_report((fs::path(config.report_dir) / file).string()));
        std::lock_guard lock(mutex);
        return cache.emplace(id, r).first->second;
    }

    void work() {
        for (;;) {
            std::string id, text;
            {
                std::unique_lock lock(mutex);
                cv.wait(lock, [&] { return stopping || !queue.empty(); });
                if (stopping) return;
                id = queue.front();
                queue.pop_front();
                busy = true;
                jobs[id].state = JobState::Running;
                text = jobs[id].experiment_text;
            }
            JobState state = JobState::Done;
            std::vector<std::string> diags;
            std::string report_id;
            try {
                Experiment e = deserialize(text);
                std::string report_text = run_local(e, config.sampler, config.machine);
                parse_report(report_text);  // a done job always has a parseable report
                std::lock_guard lock(mutex);
                report_id = store_report(report_text);
            } catch (const std::exception& ex) {
                state = JobState::Failed;
                diags.push_back(ex.what());
            }
            {
                std::lock_guard lock(mutex);
                auto& j = jobs[id];
                j.state = state;
                j.report_id = report_id;
                j.diagnostics = diags;
                busy = false;
            }
            idle_cv.notify_all();
        }
    }

    void routes() {
        server.Get("/api/kernels", [](const httplib::Request&, httplib::Response& res) {
            json out = json::array();
            for (const Signature* s : all_signatures()) out.push_back(signature_json(*s));
            reply(res, 200, out);
        });

        server.Post("/api/validate", [](const httplib::Request& req, httplib::Response& res) {
            std::vector<std::string> diags;
            try {
                diags = validate(deserialize(req.body));
            } catch (const Error& e) {
                diags.push_back(e.what());
            }
            reply(res, 200, {{"valid", diags.empty()}, {"diagnostics", diags}});
        });

        server.Post("/api/jobs", [this](const httplib::Request& req, httplib::Response& res) {
            Experiment e;
            try {
                e = deserialize(req.body);
            } catch (const Error& err) {
                return reply(res, 400, error_json("invalid experiment", {err.what()}));
            }
            if (auto diags = validate(e); !diags.empty())
                return reply(res, 400, error_json("invalid experiment", diags));
            try {
                check_sampler(config.sampler);
            } catch (const Error& err) {
                return reply(res, 409, error_json(err.what()));
            }
            JobRecord j;
            {
                std::lock_guard lock(mutex);
                j.id = "job-" + std::to_string(next_job++);
                j.experiment_text = serialize(e);
                jobs[j.id] = j;
                queue.push_back(j.id);
            }
            cv.notify_one();
            reply(res, 202, job_json(j));
        });

        server.Get("/api/jobs", [this](const httplib::Request&, httplib::Response& res) {
            json out = json::array();
            std::lock_guard lock(mutex);
            for (const auto& [id, j] : jobs) out.push_back(job_json(j));
            reply(res, 200, out);
        });

        server.Get(R"(/api/jobs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard lock(mutex);
            auto it = jobs.find(req.matches[1].str());
            if (it == jobs.end()) return reply(res, 404, error_json("unknown job '" + req.matches[1].str() + "'"));
            reply(res, 200, job_json(it->second));
        });

        server.Get("/api/reports", [this](const httplib::Request&, httplib::Response& res) {
            std::vector<std::string> ids;
            {
                std::lock_guard lock(mutex);
                for (const auto& [id, f] : index) ids.push_back(id);
            }
            json out = json::array();
            for (const auto& id : ids) {
                json o = {{"id", id}};
                try {
                    auto r = report(id);
                    o["ranged"] = r->ranged();
                    o["range_variable"] = r->ranged() ? json(r->experiment.range->var) : json(nullptr);
                    o["nreps"] = r->experiment.nreps;
                    json kernels = json::array();
                    for (const auto& c : r->experiment.calls) kernels.push_back(c.kernel);
                    o["kernels"] = kernels;
                    o["failures"] = r->failures.size();
                } catch (const std::exception& ex) {
                    o["error"] = ex.what();
                }
                out.push_back(std::move(o));
            }
            reply(res, 200, out);
        });

        server.Get(R"(/api/reports/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1].str();
            std::shared_ptr<const Report> r;
            try {
                r = report(id);
            } catch (const std::exception& ex) {
                return reply(res, 500, error_json(ex.what()));
            }
            if (!r) return reply(res, 404, error_json("unknown report '" + id + "'"));
            json metrics = json::array();
            for (const auto& m : applicable_metrics(*r, config.machine)) metrics.push_back(metric_name(m));
            json failures = json::array();
            for (const auto& f : r->failures)
                failures.push_back({{"range_value", f.range_value}, {"rep", f.rep}, {"inner", f.inner}, {"call", f.call}});
            json points = json::array();
            const auto reduced = reduce(*r);
            for (std::size_t i = 0; i < r->points.size(); ++i) {
                json reps = json::array();
                for (const auto& m : reduced[i])
                    reps.push_back({{"cycles", m.cycles}, {"flops", m.flops}, {"counters", m.counters}, {"failed", m.failed}});
                points.push_back({{"value", r->points[i].value}, {"nthreads", r->points[i].nthreads},
                                  {"inner_values", r->points[i].inner_values}, {"reduced", reps}});
            }
            reply(res, 200,
                  {{"id", id},
                   {"experiment", serialize(r->experiment)},
                   {"timer", r->timer},
                   {"counters_available", r->counters_available},
                   {"counters", r->experiment.counters},
                   {"metrics", metrics},
                   {"failures", failures},
                   {"points", points}});
        });

        server.Get(R"(/api/reports/([^/]+)/series)", [this](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1].str();
            std::shared_ptr<const Report> r;
            try {
                r = report(id);
            } catch (const std::exception& ex) {
                return reply(res, 500, error_json(ex.what()));
            }
            if (!r) return reply(res, 404, error_json("unknown report '" + id + "'"));
            try {
                SeriesQuery q;
                q.metric = parse_metric(req.has_param("metric") ? req.get_param_value("metric") : "cycles",
                                        r->experiment.counters);
                q.statistic = parse_statistic(req.has_param("stat") ? req.get_param_value("stat") : "median");
                q.discard_first = !req.has_param("discard_first") || truthy(req.get_param_value("discard_first"));
                const bool breakdown = req.has_param("breakdown") && truthy(req.get_param_value("breakdown"));
                auto list = breakdown ? breakdown_series(*r, q, config.machine)
                                      : std::vector<Series>{series(*r, q, config.machine)};
                json out = json::array();
                for (const auto& s : list) {
                    json pts = json::array();
                    for (const auto& p : s.points) pts.push_back({{"x", p.x}, {"y", p.y ? json(*p.y) : json(nullptr)}});
                    out.push_back({{"label", s.label}, {"points", pts}});
                }
                reply(res, 200,
                      {{"metric", metric_name(q.metric)},
                       {"statistic", statistic_name(q.statistic)},
                       {"discard_first", q.discard_first},
                       {"range_variable", r->ranged() ? json(r->experiment.range->var) : json(nullptr)},
                       {"series", out}});
            } catch (const Error& err) {
                reply(res, 400, error_json(err.what()));
            }
        });

        if (!config.webui_dir.empty() && fs::is_directory(config.webui_dir))
            server.set_mount_point("/", config.webui_dir);
    }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() { stop(); }

void Service::start() {
    impl_->load_index();
    impl_->routes();
    auto& s = impl_->server;
    if (impl_->config.port == 0) {
        impl_->bound_port = s.bind_to_any_port(impl_->config.host);
    } else {
        impl_->bound_port = s.bind_to_port(impl_->config.host, impl_->config.port) ? impl_->config.port : -1;
    }
    if (impl_->bound_port <= 0)
        throw Error(ErrorCode::Io, "cannot bind " + impl_->config.host + ":" + std::to_string(impl_->config.port));
    impl_->worker = std::thread([this] { impl_->work(); });
    impl_->listener = std::thread([this] { impl_->server.listen_after_bind(); });
    // a stop() issued before the listener is running would be lost
    s.wait_until_ready();
}

int Service::port() const { return impl_->bound_port; }

void Service::wait() {
    if (impl_->listener.joinable()) impl_->listener.join();
}

void Service::stop() {
    if (!impl_) return;
    impl_->server.stop();
    {
        std::lock_guard lock(impl_->mutex);
        impl_->stopping = true;
    }
    impl_->cv.notify_all();
    if (impl_->listener.joinable() && impl_->listener.get_id() != std::this_thread::get_id()) impl_->listener.join();
    if (impl_->worker.joinable()) impl_->worker.join();
}

void Service::drain() {
    std::unique_lock lock(impl_->mutex);
    impl_->idle_cv.wait(lock, [&] { return impl_->queue.empty() && !impl_->busy; });
}

}  // namespace kernbench
