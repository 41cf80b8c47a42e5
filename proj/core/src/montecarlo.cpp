#include "spdelab/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "spdelab/errors.hpp"

namespace spdelab {

DensitySampler::DensitySampler(const GridFunction& p0) {
    const Grid& grid = p0.grid();
    x_.assign(grid.nodes().begin(), grid.nodes().end());
    p_.assign(p0.values().begin(), p0.values().end());
    cdf_.assign(p_.size(), 0.0);
    for (double v : p_)
        if (!(v >= 0.0)) throw InvalidArgument("density values must be nonnegative");
    for (std::size_t i = 1; i < p_.size(); ++i)
        cdf_[i] = cdf_[i - 1] + 0.5 * (p_[i - 1] + p_[i]) * (x_[i] - x_[i - 1]);
    total_ = cdf_.back();
    if (!(total_ > 0.0)) throw InvalidArgument("density has no mass");
}

double DensitySampler::quantile(double u) const {
    const double target = std::clamp(u, 0.0, 1.0) * total_;
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
    std::size_t j = it == cdf_.begin() ? 0 : static_cast<std::size_t>(it - cdf_.begin()) - 1;
    j = std::min(j, cdf_.size() - 2);
    const double h = x_[j + 1] - x_[j];
    const double r = target - cdf_[j];
    const double slope = 0.5 * (p_[j + 1] - p_[j]) / h;
    const double disc = p_[j] * p_[j] + 4.0 * slope * r;
    const double denom = p_[j] + std::sqrt(std::max(disc, 0.0));
    const double s = denom > 0.0 ? 2.0 * r / denom : 0.0;
    return std::clamp(x_[j] + s, x_[j], x_[j + 1]);
}

double DensitySampler::draw(std::mt19937_64& engine) const {
    return quantile(std::generate_canonical<double, 53>(engine));
}

PathState TrajectorySet::state(std::size_t path, std::size_t step) const noexcept {
    const std::size_t levels = omega.size() / (paths * tree_dim);
    const std::size_t k = std::min(step / substeps, levels - 1);
    PathState s;
    s.t = static_cast<double>(k * substeps) * dt_mc;
    const double* w = omega.data() + (path * levels + k) * tree_dim;
    for (std::size_t j = 0; j < tree_dim; ++j) s.omega[j] = w[j];
    return s;
}

namespace {

/// Welford accumulator; merge() follows the pairwise update so chunked reductions are exact
/// in a fixed order.
struct Moments {
    double n = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) noexcept {
        n += 1.0;
        const double delta = x - mean;
        mean += delta / n;
        m2 += delta * (x - mean);
    }
    void merge(const Moments& o) noexcept {
        if (o.n == 0.0) return;
        if (n == 0.0) {
            *this = o;
            return;
        }
        const double total = n + o.n;
        const double delta = o.mean - mean;
        mean += delta * o.n / total;
        m2 += o.m2 + delta * delta * n * o.n / total;
        n = total;
    }
    EstimatorResult result() const noexcept {
        EstimatorResult r;
        r.mean = mean;
        r.count = static_cast<std::size_t>(n);
        r.std_error = n > 1.0 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0;
        return r;
    }
};

constexpr std::size_t kChunk = 256;

/// Runs body(first, last, chunk) over fixed path chunks on `workers` threads.
template <class Body>
void for_chunks(std::size_t paths, std::size_t workers, Body&& body) {
    const std::size_t chunks = (paths + kChunk - 1) / kChunk;
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t c = next++; c < chunks; c = next++)
            body(c * kChunk, std::min(paths, (c + 1) * kChunk), c);
    };
    const std::size_t n = std::max<std::size_t>(1, std::min(workers, chunks));
    if (n == 1) {
        work();
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
}

void require_inside(const DomainSpec& domain, double x) {
    if (!std::isfinite(x)) throw InvalidArgument("initial value must be finite");
    if (domain.absorbing() && (x < domain.a || x > domain.b))
        throw InvalidArgument("initial value lies outside the closed domain");
}

void require_compatible(const CoefficientSet& coeffs, const PathBundle& paths,
                        const DomainSpec& domain) {
    domain.validate();
    if (paths.noise_dim() != coeffs.noise_dim())
        throw InvalidArgument("path bundle dimension differs from d0");
    if (paths.tree().dim() != coeffs.tree_dim())
        throw InvalidArgument("tree dimension differs from the coefficient family's d");
    const double T = domain.horizon;
    if (std::abs(paths.tree().horizon() - T) > 1e-12 * T)
        throw InvalidArgument("tree horizon differs from the domain horizon");
}

/// Path noise read from a fully drawn realisation.
struct StoredSource {
    const PathBundle::Realization& real;
    std::size_t d;
    std::size_t d0;

    const double* omega(std::size_t k) const noexcept { return real.omega.data() + k * d; }
    const double* increments(std::size_t i) const noexcept {
        return real.increments.data() + i * d0;
    }
};

/// Path noise drawn tree step by tree step, only as far as some start needs it. Drawn
/// blocks are kept, so several starts can reuse the same realisation.
struct LazySource {
    PathBundle::Cursor cursor;
    std::size_t substeps;
    std::size_t d0;
    std::vector<double>& cache;

    LazySource(const PathBundle& bundle, std::size_t path, std::vector<double>& buffer)
        : cursor(bundle, path), substeps(bundle.substeps()), d0(bundle.noise_dim()),
          cache(buffer) {
        cache.resize(bundle.fine_steps() * d0);
    }

    void draw_through(std::size_t k) {
        while (cursor.loaded() < k) {
            const std::size_t at = cursor.loaded() * substeps * d0;
            cursor.advance();
            std::copy(cursor.block().begin(), cursor.block().end(),
                      cache.begin() + static_cast<std::ptrdiff_t>(at));
        }
    }
    const double* omega(std::size_t k) {
        draw_through(k);
        return cursor.omega(k).data();
    }
    const double* increments(std::size_t i) {
        draw_through(i / substeps + 1);
        return cache.data() + i * d0;
    }
};

/// Euler-Maruyama along one realisation from fine step `start`. visit(i, y, state) is called
/// at every fine step i in [start, F] while the path is alive. Returns the exit step
/// (F when the path never leaves) and leaves the frozen value in y.
template <class Source, class Visit>
std::size_t run_path(const CoefficientSet& coeffs, const PathBundle& paths,
                     const DomainSpec& domain, Source& source, std::size_t start, double& y,
                     Visit&& visit) {
    const std::size_t fine = paths.fine_steps();
    const std::size_t s = paths.substeps();
    const std::size_t d = paths.tree().dim();
    const std::size_t d0 = paths.noise_dim();
    const double dt = paths.dt_mc();
    const double dt_tree = paths.tree().dt();
    const bool absorbing = domain.absorbing();
    PathState state;
    std::size_t level = static_cast<std::size_t>(-1);
    for (std::size_t i = start;; ++i) {
        const std::size_t k = i / s;
        if (k != level) {
            level = k;
            state.t = static_cast<double>(k) * dt_tree;
            const double* w = source.omega(k);
            for (std::size_t j = 0; j < d; ++j) state.omega[j] = w[j];
        }
        visit(i, y, state);
        if (i == fine) return fine;
        double next = y + coeffs.drift(y, state) * dt;
        const double* inc = source.increments(i);
        for (std::size_t j = 0; j < d0; ++j) next += coeffs.beta(j, y, state) * inc[j];
        if (!std::isfinite(next)) throw NumericalError("trajectory became non-finite");
        y = next;
        if (absorbing && (next < domain.a || next > domain.b)) return i + 1;
    }
}

double initial_value(const InitialCondition& init, std::mt19937_64& aux) {
    return init.random() ? init.sampler->draw(aux) : init.x;
}

}  // namespace

TrajectorySet simulate(const CoefficientSet& coeffs, const InitialCondition& init, double s,
                       const PathBundle& paths, const DomainSpec& domain,
                       const RecordSpec& record, std::size_t workers) {
    require_compatible(coeffs, paths, domain);
    if (!init.random()) require_inside(domain, init.x);
    const double ratio = s / paths.dt_mc();
    const double start_r = std::round(ratio);
    if (s < 0.0 || std::abs(ratio - start_r) > 1e-9 * std::max(1.0, ratio))
        throw InvalidArgument("start time must be a fine mesh point in [0, T)");
    const auto start = static_cast<std::size_t>(start_r);
    const std::size_t fine = paths.fine_steps();
    if (start >= fine) throw InvalidArgument("start time must be a fine mesh point in [0, T)");

    TrajectorySet out;
    out.s = s;
    out.dt_mc = paths.dt_mc();
    out.start_step = start;
    out.fine_steps = fine;
    out.substeps = paths.substeps();
    out.tree_dim = paths.tree().dim();
    out.paths = paths.size();
    out.seed = paths.seed();
    if (record.steps.empty()) {
        for (std::size_t i = start; i <= fine; ++i) out.record_steps.push_back(i);
    } else {
        out.record_steps = record.steps;
        std::sort(out.record_steps.begin(), out.record_steps.end());
        out.record_steps.erase(std::unique(out.record_steps.begin(), out.record_steps.end()),
                               out.record_steps.end());
        if (out.record_steps.front() < start || out.record_steps.back() > fine)
            throw InvalidArgument("recorded steps must lie between the start and T");
    }
    const std::size_t nrec = out.record_steps.size();
    const std::size_t levels = paths.tree().steps() + 1;
    out.y.assign(paths.size() * nrec, 0.0);
    out.exit_step.assign(paths.size(), fine);
    out.tau.assign(paths.size(), domain.horizon);
    out.omega.assign(paths.size() * levels * out.tree_dim, 0.0);

    std::vector<std::ptrdiff_t> slot(fine + 1, -1);
    for (std::size_t r = 0; r < nrec; ++r) slot[out.record_steps[r]] = static_cast<std::ptrdiff_t>(r);

    for_chunks(paths.size(), workers, [&](std::size_t first, std::size_t last, std::size_t) {
        PathBundle::Realization real;
        for (std::size_t m = first; m < last; ++m) {
            paths.generate(m, real);
            auto aux = paths.auxiliary_engine(m);
            double y = initial_value(init, aux);
            double* row = out.y.data() + m * nrec;
            StoredSource src{real, out.tree_dim, paths.noise_dim()};
            const std::size_t e = run_path(coeffs, paths, domain, src, start, y,
                                           [&](std::size_t i, double yi, const PathState&) {
                                               if (slot[i] >= 0) row[slot[i]] = yi;
                                           });
            out.exit_step[m] = e;
            if (e < fine) out.tau[m] = static_cast<double>(e) * out.dt_mc;
            for (std::size_t r = 0; r < nrec; ++r)
                if (out.record_steps[r] >= e) row[r] = y;
            std::copy(real.omega.begin(), real.omega.end(),
                      out.omega.begin() + static_cast<std::ptrdiff_t>(m * levels * out.tree_dim));
        }
    });
    return out;
}

EstimatorResult estimate_functional(const TrajectorySet& trajs, const Integrand& phi) {
    const std::size_t expected = trajs.fine_steps - trajs.start_step + 1;
    if (trajs.record_steps.size() != expected || trajs.record_steps.front() != trajs.start_step)
        throw InvalidArgument("functional estimate needs every fine step recorded");
    Moments acc;
    for (std::size_t m = 0; m < trajs.paths; ++m) {
        double sum = 0.0;
        for (std::size_t r = 0; r + 1 < expected; ++r) {
            const std::size_t i = trajs.record_steps[r];
            if (!trajs.alive(m, i)) break;
            sum += phi(trajs.value(m, r), trajs.time(i), trajs.state(m, i));
        }
        acc.add(sum * trajs.dt_mc);
    }
    return acc.result();
}

std::vector<EstimatorResult> functional_streaming(const CoefficientSet& coeffs,
                                                  std::span<const InitialCondition> inits,
                                                  const PathBundle& paths,
                                                  const DomainSpec& domain, const Integrand& phi,
                                                  std::size_t workers) {
    require_compatible(coeffs, paths, domain);
    for (const auto& init : inits)
        if (!init.random()) require_inside(domain, init.x);
    const std::size_t n_init = inits.size();
    const std::size_t fine = paths.fine_steps();
    const double dt = paths.dt_mc();
    const std::size_t chunks = (paths.size() + kChunk - 1) / kChunk;
    std::vector<Moments> partial(chunks * n_init);

    for_chunks(paths.size(), workers, [&](std::size_t first, std::size_t last, std::size_t c) {
        std::vector<double> buffer;
        for (std::size_t m = first; m < last; ++m) {
            LazySource src(paths, m, buffer);
            auto aux = paths.auxiliary_engine(m);
            for (std::size_t q = 0; q < n_init; ++q) {
                double y = initial_value(inits[q], aux);
                double sum = 0.0;
                run_path(coeffs, paths, domain, src, 0, y,
                         [&](std::size_t i, double yi, const PathState& st) {
                             if (i < fine) sum += phi(yi, static_cast<double>(i) * dt, st);
                         });
                partial[c * n_init + q].add(sum * dt);
            }
        }
    });

    std::vector<EstimatorResult> out(n_init);
    for (std::size_t q = 0; q < n_init; ++q) {
        Moments acc;
        for (std::size_t c = 0; c < chunks; ++c) acc.merge(partial[c * n_init + q]);
        out[q] = acc.result();
    }
    return out;
}

std::vector<EstimatorResult> observe_streaming(const CoefficientSet& coeffs,
                                               const InitialCondition& init,
                                               const PathBundle& paths, const DomainSpec& domain,
                                               const Integrand& phi,
                                               std::span<const std::size_t> steps,
                                               std::size_t workers) {
    require_compatible(coeffs, paths, domain);
    if (!init.random()) require_inside(domain, init.x);
    const std::size_t fine = paths.fine_steps();
    const std::size_t n_obs = steps.size();
    std::vector<std::vector<std::size_t>> slots(fine + 1);
    for (std::size_t q = 0; q < n_obs; ++q) {
        if (steps[q] > fine) throw InvalidArgument("observation step beyond T");
        slots[steps[q]].push_back(q);
    }
    const double dt = paths.dt_mc();
    const std::size_t chunks = (paths.size() + kChunk - 1) / kChunk;
    std::vector<Moments> partial(chunks * n_obs);

    for_chunks(paths.size(), workers, [&](std::size_t first, std::size_t last, std::size_t c) {
        std::vector<double> value(n_obs);
        std::vector<double> buffer;
        for (std::size_t m = first; m < last; ++m) {
            LazySource src(paths, m, buffer);
            auto aux = paths.auxiliary_engine(m);
            double y = initial_value(init, aux);
            std::fill(value.begin(), value.end(), 0.0);
            run_path(coeffs, paths, domain, src, 0, y,
                     [&](std::size_t i, double yi, const PathState& st) {
                         for (std::size_t q : slots[i])
                             value[q] = phi(yi, static_cast<double>(i) * dt, st);
                     });
            for (std::size_t q = 0; q < n_obs; ++q) partial[c * n_obs + q].add(value[q]);
        }
    });

    std::vector<EstimatorResult> out(n_obs);
    for (std::size_t q = 0; q < n_obs; ++q) {
        Moments acc;
        for (std::size_t c = 0; c < chunks; ++c) acc.merge(partial[c * n_obs + q]);
        out[q] = acc.result();
    }
    return out;
}

std::vector<EstimatorResult> conditional_functional(
    const CoefficientSet& coeffs, const Integrand& phi, std::shared_ptr<const ScenarioTree> tree,
    std::size_t leaf, std::span<const std::size_t> levels, std::size_t paths, double dt_mc,
    std::uint64_t seed, const InitialCondition& init, const DomainSpec& domain,
    std::size_t workers) {
    if (coeffs.noise_dim() <= coeffs.tree_dim())
        throw InvalidArgument("conditional functional requires d < d0");
    const PathBundle bundle(std::move(tree), PathLaw::fixed_leaf, paths, coeffs.noise_dim(), dt_mc,
                            seed, leaf);
    std::vector<std::size_t> steps;
    for (std::size_t k : levels) {
        if (k > bundle.tree().steps()) throw InvalidArgument("level out of range");
        steps.push_back(k * bundle.substeps());
    }
    return observe_streaming(coeffs, init, bundle, domain, phi, steps, workers);
}

GridFunction empirical_density(const TrajectorySet& trajs, double t,
                               std::shared_ptr<const Grid> grid) {
    const double ratio = t / trajs.dt_mc;
    const double r = std::round(ratio);
    if (t < 0.0 || std::abs(ratio - r) > 1e-9 * std::max(1.0, ratio))
        throw InvalidArgument("time is not a fine mesh point");
    const auto step = static_cast<std::size_t>(r);
    auto it = std::lower_bound(trajs.record_steps.begin(), trajs.record_steps.end(), step);
    if (it == trajs.record_steps.end() || *it != step)
        throw InvalidArgument("time was not recorded");
    const std::size_t rec = static_cast<std::size_t>(it - trajs.record_steps.begin());
    GridFunction out(grid);
    const double a = grid->domain().a;
    const double dx = grid->dx();
    const double w = 1.0 / (static_cast<double>(trajs.paths) * dx);
    const auto last = static_cast<double>(grid->size() - 1);
    for (std::size_t m = 0; m < trajs.paths; ++m) {
        if (!trajs.alive(m, step)) continue;
        const double cell = std::clamp(std::floor((trajs.value(m, rec) - a) / dx + 0.5), 0.0, last);
        out[static_cast<std::size_t>(cell)] += w;
    }
    return out;
}

}  // namespace spdelab
