#include "parknet/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <mutex>
#include <numeric>
#include <thread>

namespace parknet {

ServiceDistribution ServiceDistribution::exponential(double mean) {
    ServiceDistribution d;
    d.kind = Kind::exponential;
    d.mean = mean;
    d.validate();
    return d;
}

ServiceDistribution ServiceDistribution::deterministic(double value) {
    ServiceDistribution d;
    d.kind = Kind::deterministic;
    d.mean = value;
    d.validate();
    return d;
}

ServiceDistribution ServiceDistribution::empirical(std::vector<double> samples) {
    ServiceDistribution d;
    d.kind = Kind::empirical;
    d.samples = std::move(samples);
    if (!d.samples.empty())
        d.mean = std::accumulate(d.samples.begin(), d.samples.end(), 0.0) /
                 static_cast<double>(d.samples.size());
    d.validate();
    return d;
}

void ServiceDistribution::validate() const {
    if (!std::isfinite(mean) || mean <= 0.0)
        throw std::invalid_argument("ServiceDistribution: mean must be positive");
    if (kind == Kind::empirical) {
        if (samples.empty())
            throw std::invalid_argument("ServiceDistribution: empirical sample set is empty");
        for (double s : samples)
            if (!std::isfinite(s) || s <= 0.0)
                throw std::invalid_argument(
                    "ServiceDistribution: empirical samples must be positive");
    }
}

namespace {

// uniform in [0, 1) from the top 53 bits
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double exp_sample(std::mt19937_64& rng, double mean) {
    return -mean * std::log(1.0 - uniform01(rng)); // 1-u in (0,1]
}

// unbiased-enough index draw via multiply-shift
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(rng()) * n) >> 64);
}

} // namespace

double sample_service(const ServiceDistribution& dist, std::mt19937_64& rng) {
    switch (dist.kind) {
        case ServiceDistribution::Kind::exponential:
            return exp_sample(rng, dist.mean);
        case ServiceDistribution::Kind::deterministic:
            return dist.mean;
        case ServiceDistribution::Kind::empirical:
            return dist.samples[uniform_index(rng, dist.samples.size())];
    }
    throw std::logic_error("sample_service: unknown distribution kind");
}

void SimConfig::validate() const {
    if (topology.size() == 0)
        throw SimConfigError("SimConfig: topology has no nodes");
    if (service.size() != topology.size())
        throw SimConfigError("SimConfig: need one service distribution per node");
    for (const auto& s : service) s.validate();
    if (!std::isfinite(horizon) || horizon <= 0.0)
        throw SimConfigError("SimConfig: horizon must be positive");
    if (!std::isfinite(warmup) || warmup < 0.0 || warmup >= horizon)
        throw SimConfigError("SimConfig: warmup must satisfy 0 <= warmup < horizon");
    if (replications < 1)
        throw SimConfigError("SimConfig: replications must be >= 1");
    if (!std::isfinite(convergence_bucket) || convergence_bucket < 0.0)
        throw SimConfigError("SimConfig: convergence_bucket must be >= 0");
}

namespace {

enum class EventKind : std::uint8_t { exo_arrival, transit_arrival, departure };

struct Event {
    double time;
    std::uint64_t seq; // FIFO tie-break at equal timestamps
    EventKind kind;
    std::int32_t node;
    double first_rejection; // task payload; < 0 means never rejected
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time != b.time) return a.time > b.time;
        return a.seq > b.seq;
    }
};

class Engine {
public:
    explicit Engine(const SimConfig& config)
        : cfg_(config),
          rng_(config.seed),
          n_(static_cast<int>(config.topology.size())) {}

    SimReport execute() {
        const double horizon = cfg_.horizon;
        busy_.assign(n_, 0);
        last_change_.assign(n_, 0.0);
        busy_integral_.assign(n_, 0.0);
        report_ = SimReport{};
        report_.node.assign(n_, NodeReport{});

        const bool series = cfg_.convergence_bucket > 0.0;
        if (series) {
            bucket_count_ = static_cast<std::size_t>(
                std::ceil(horizon / cfg_.convergence_bucket));
            bucket_integral_.assign(n_, std::vector<double>(bucket_count_, 0.0));
        }

        for (int i = 0; i < n_; ++i) {
            const double lambda = cfg_.topology.nodes()[i].queue.exo_arrival_rate;
            if (lambda > 0.0)
                push({exp_sample(rng_, 1.0 / lambda), next_seq_++,
                      EventKind::exo_arrival, i, -1.0});
        }

        while (!heap_.empty() && heap_.front().time <= horizon) {
            const Event ev = pop();
            switch (ev.kind) {
                case EventKind::exo_arrival: {
                    ++report_.total_arrivals;
                    const double lambda =
                        cfg_.topology.nodes()[ev.node].queue.exo_arrival_rate;
                    push({ev.time + exp_sample(rng_, 1.0 / lambda), next_seq_++,
                          EventKind::exo_arrival, ev.node, -1.0});
                    if (ev.time >= cfg_.warmup)
                        ++report_.node[ev.node].exo_arrivals;
                    arrive(ev.time, ev.node, ev.first_rejection, true);
                    break;
                }
                case EventKind::transit_arrival:
                    if (ev.time >= cfg_.warmup)
                        ++report_.node[ev.node].transit_arrivals;
                    arrive(ev.time, ev.node, ev.first_rejection, false);
                    break;
                case EventKind::departure:
                    record_busy_change(ev.node, ev.time);
                    --busy_[ev.node];
                    ++report_.served_count;
                    break;
            }
        }

        // events left behind tell us where every unfinished task is
        for (const Event& ev : heap_) {
            if (ev.kind == EventKind::departure) ++report_.in_service_at_end;
            if (ev.kind == EventKind::transit_arrival) ++report_.still_in_transit;
        }

        finalize(horizon);
        return std::move(report_);
    }

private:
    void push(Event ev) {
        heap_.push_back(ev);
        std::push_heap(heap_.begin(), heap_.end(), EventAfter{});
    }

    Event pop() {
        std::pop_heap(heap_.begin(), heap_.end(), EventAfter{});
        Event ev = heap_.back();
        heap_.pop_back();
        return ev;
    }

    void arrive(double t, int node, double first_rejection, bool exogenous) {
        const auto& q = cfg_.topology.nodes()[node].queue;
        if (busy_[node] < q.servers) {
            record_busy_change(node, t);
            ++busy_[node];
            push({t + sample_service(cfg_.service[node], rng_), next_seq_++,
                  EventKind::departure, node, -1.0});
            if (t >= cfg_.warmup) {
                ++report_.start_count;
                if (first_rejection >= 0.0) {
                    ++report_.searched_count;
                    search_sum_ += t - first_rejection;
                }
            }
            return;
        }

        // full: the task is turned away here and searches on
        ++report_.total_rejections;
        if (t >= cfg_.warmup) {
            ++report_.node[node].rejection_count;
            if (exogenous) ++report_.node[node].exo_blocked;
        }
        if (first_rejection < 0.0) first_rejection = t;

        const auto& out = cfg_.topology.out_edges(node);
        if (out.empty()) {
            if (cfg_.dead_end_policy == DeadEndPolicy::error)
                throw SimConfigError(
                    "rejected task has nowhere to go: node '" +
                    cfg_.topology.nodes()[node].id + "' has no out-edges");
            ++report_.dropped_count;
            return;
        }
        const auto& edge = out[uniform_index(rng_, out.size())];
        push({t + edge.travel_time, next_seq_++, EventKind::transit_arrival,
              edge.to, first_rejection});
    }

    void record_busy_change(int node, double t) {
        const double t0 = last_change_[node];
        const double busy = busy_[node];
        last_change_[node] = t;
        if (busy == 0.0 || t <= t0) return;

        const double w0 = std::max(t0, cfg_.warmup);
        const double w1 = std::min(t, cfg_.horizon);
        if (w1 > w0) busy_integral_[node] += busy * (w1 - w0);

        if (!bucket_integral_.empty()) {
            const double width = cfg_.convergence_bucket;
            std::size_t b = static_cast<std::size_t>(t0 / width);
            double seg_start = t0;
            const double seg_end = std::min(t, cfg_.horizon);
            while (seg_start < seg_end && b < bucket_count_) {
                const double b_end = std::min((b + 1) * width, seg_end);
                bucket_integral_[node][b] += busy * (b_end - seg_start);
                seg_start = b_end;
                ++b;
            }
        }
    }

    void finalize(double horizon) {
        const double window = horizon - cfg_.warmup;
        for (int i = 0; i < n_; ++i) {
            record_busy_change(i, horizon); // flush the tail segment
            const auto& q = cfg_.topology.nodes()[i].queue;
            report_.node[i].occupancy = busy_integral_[i] / (q.servers * window);
            report_.node[i].rejection_rate =
                static_cast<double>(report_.node[i].rejection_count) / window;
        }
        report_.average_search_time =
            report_.searched_count ? search_sum_ / report_.searched_count : 0.0;
        report_.average_search_time_all =
            report_.start_count ? search_sum_ / report_.start_count : 0.0;

        if (!bucket_integral_.empty()) {
            report_.occupancy_series.assign(n_, std::vector<double>(bucket_count_, 0.0));
            for (int i = 0; i < n_; ++i) {
                const auto& q = cfg_.topology.nodes()[i].queue;
                for (std::size_t b = 0; b < bucket_count_; ++b) {
                    const double b_start = b * cfg_.convergence_bucket;
                    const double b_width =
                        std::min(horizon, (b + 1) * cfg_.convergence_bucket) - b_start;
                    report_.occupancy_series[i][b] =
                        bucket_integral_[i][b] / (q.servers * b_width);
                }
            }
        }

        const std::uint64_t accounted = report_.served_count + report_.in_service_at_end +
                                        report_.still_in_transit + report_.dropped_count;
        if (accounted != report_.total_arrivals)
            throw std::logic_error("simulator lost track of tasks: conservation violated");
    }

    const SimConfig& cfg_;
    std::mt19937_64 rng_;
    int n_;
    std::uint64_t next_seq_ = 0;
    std::vector<Event> heap_;
    std::vector<int> busy_;
    std::vector<double> last_change_;
    std::vector<double> busy_integral_;
    std::vector<std::vector<double>> bucket_integral_;
    std::size_t bucket_count_ = 0;
    SimReport report_;
    double search_sum_ = 0.0;
};

Aggregate aggregate_of(const std::vector<double>& xs) {
    Aggregate a;
    const auto n = static_cast<double>(xs.size());
    if (xs.empty()) return a;
    a.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - a.mean) * (x - a.mean);
        a.stddev = std::sqrt(ss / (n - 1.0));
    }
    return a;
}

} // namespace

SimReport run(const SimConfig& config) {
    config.validate();
    return Engine(config).execute();
}

ReplicatedReport replicate(const SimConfig& config) {
    config.validate();
    const int reps = config.replications;

    ReplicatedReport out;
    out.runs.resize(reps);

    const unsigned workers = std::min<unsigned>(
        std::max(1u, std::thread::hardware_concurrency()), static_cast<unsigned>(reps));
    std::atomic<int> cursor{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        for (int i = cursor.fetch_add(1); i < reps; i = cursor.fetch_add(1)) {
            try {
                SimConfig c = config;
                c.seed = config.seed + static_cast<std::uint64_t>(i);
                c.replications = 1;
                out.runs[i] = run(c);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::future<void>> futures;
        for (unsigned w = 0; w < workers; ++w)
            futures.push_back(std::async(std::launch::async, worker));
        for (auto& f : futures) f.get();
    }
    if (failure) std::rethrow_exception(failure);

    const std::size_t n = config.topology.size();
    out.occupancy.resize(n);
    out.rejection_rate.resize(n);
    std::vector<double> tmp(reps);
    for (std::size_t i = 0; i < n; ++i) {
        for (int r = 0; r < reps; ++r) tmp[r] = out.runs[r].node[i].occupancy;
        out.occupancy[i] = aggregate_of(tmp);
        for (int r = 0; r < reps; ++r) tmp[r] = out.runs[r].node[i].rejection_rate;
        out.rejection_rate[i] = aggregate_of(tmp);
    }
    for (int r = 0; r < reps; ++r) tmp[r] = out.runs[r].average_search_time;
    out.average_search_time = aggregate_of(tmp);
    for (int r = 0; r < reps; ++r) tmp[r] = out.runs[r].average_search_time_all;
    out.average_search_time_all = aggregate_of(tmp);

    if (config.convergence_bucket > 0.0 && !out.runs.empty()) {
        const std::size_t buckets = out.runs[0].occupancy_series.empty()
                                        ? 0
                                        : out.runs[0].occupancy_series[0].size();
        out.occupancy_series.assign(n, std::vector<Aggregate>(buckets));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t b = 0; b < buckets; ++b) {
                for (int r = 0; r < reps; ++r)
                    tmp[r] = out.runs[r].occupancy_series[i][b];
                out.occupancy_series[i][b] = aggregate_of(tmp);
            }
    }
    return out;
}

std::vector<std::vector<double>> convergence_series(const SimConfig& config) {
    if (config.convergence_bucket <= 0.0)
        throw SimConfigError("convergence_series: convergence_bucket must be > 0");
    ReplicatedReport rep = replicate(config);
    std::vector<std::vector<double>> mean(rep.occupancy_series.size());
    for (std::size_t i = 0; i < mean.size(); ++i) {
        mean[i].resize(rep.occupancy_series[i].size());
        for (std::size_t b = 0; b < mean[i].size(); ++b)
            mean[i][b] = rep.occupancy_series[i][b].mean;
    }
    return mean;
}

} // namespace parknet
