#include "ramp/noise.hpp"

#include <cmath>
#include <sstream>

namespace ramp {

namespace {

constexpr double kWeightTol = 1e-12;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

}  // namespace

void NoiseModel::validate() const {
    double total = 0.0;
    for (const auto& g : gaussians_) {
        if (g.weight < 0.0) throw std::invalid_argument("NoiseModel: negative weight");
        if (!(g.sd > 0.0))
            throw std::invalid_argument("NoiseModel: gaussian sd must be positive (use an atom)");
        total += g.weight;
    }
    for (const auto& a : atoms_) {
        if (a.weight < 0.0) throw std::invalid_argument("NoiseModel: negative weight");
        total += a.weight;
    }
    if (std::abs(total - 1.0) > kWeightTol)
        throw std::invalid_argument("NoiseModel: weights must sum to 1");
}

NoiseModel NoiseModel::normal(double mean, double sd) {
    NoiseModel m;
    m.gaussians_ = {{1.0, mean, sd}};
    m.name_ = "normal:" + std::to_string(mean) + "," + std::to_string(sd);
    m.validate();
    return m;
}

NoiseModel NoiseModel::contaminated_normal(double eps, double location) {
    if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("cn: eps must lie in [0,1]");
    NoiseModel m;
    if (eps < 1.0) m.gaussians_ = {{1.0 - eps, 0.0, 1.0}};
    if (eps > 0.0) m.atoms_ = {{eps, location}};
    m.name_ = "cn:" + std::to_string(eps) + "," + std::to_string(location);
    m.validate();
    return m;
}

NoiseModel NoiseModel::mixture(std::vector<GaussianComponent> gaussians,
                               std::vector<PointAtom> atoms, std::string name) {
    NoiseModel m;
    m.gaussians_ = std::move(gaussians);
    m.atoms_ = std::move(atoms);
    m.name_ = name.empty() ? "mixture" : std::move(name);
    m.validate();
    return m;
}

NoiseModel NoiseModel::atom(double location) {
    NoiseModel m;
    m.atoms_ = {{1.0, location}};
    m.name_ = "atom:1," + std::to_string(location);
    m.validate();
    return m;
}

double NoiseModel::mean() const {
    double mu = 0.0;
    for (const auto& g : gaussians_) mu += g.weight * g.mean;
    for (const auto& a : atoms_) mu += a.weight * a.location;
    return mu;
}

double NoiseModel::second_moment() const {
    double m2 = 0.0;
    for (const auto& g : gaussians_) m2 += g.weight * (g.mean * g.mean + g.sd * g.sd);
    for (const auto& a : atoms_) m2 += a.weight * a.location * a.location;
    return m2;
}

double NoiseModel::variance() const {
    const double mu = mean();
    return second_moment() - mu * mu;
}

Vector NoiseModel::sample(int n, RngStream& rng) const {
    if (n < 0) throw std::invalid_argument("sample: n must be nonnegative");
    Vector out(n);
    for (int i = 0; i < n; ++i) {
        double u = rng.uniform();
        double drawn = 0.0;
        bool done = false;
        for (const auto& g : gaussians_) {
            if (u < g.weight) {
                drawn = g.mean + g.sd * rng.normal();
                done = true;
                break;
            }
            u -= g.weight;
        }
        if (!done) {
            for (const auto& a : atoms_) {
                if (u < a.weight) {
                    drawn = a.location;
                    done = true;
                    break;
                }
                u -= a.weight;
            }
        }
        if (!done) {
            // rounding left u slightly above the total mass; take the last component
            drawn = atoms_.empty() ? gaussians_.back().mean + gaussians_.back().sd * rng.normal()
                                   : atoms_.back().location;
        }
        out[i] = drawn;
    }
    return out;
}

NoiseModel parse_noise(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (head == "normal") {
        const auto parts = split(args, ',');
        if (parts.size() != 2) throw std::invalid_argument("parse_noise: normal:MEAN,SD");
        return NoiseModel::normal(std::stod(parts[0]), std::stod(parts[1]));
    }
    if (head == "cn") {
        const auto parts = split(args, ',');
        if (parts.size() != 2) throw std::invalid_argument("parse_noise: cn:EPS,LOC");
        return NoiseModel::contaminated_normal(std::stod(parts[0]), std::stod(parts[1]));
    }
    if (head == "mix") {
        std::vector<GaussianComponent> comps;
        for (const auto& entry : split(args, ';')) {
            const auto parts = split(entry, ',');
            if (parts.size() != 3)
                throw std::invalid_argument("parse_noise: mix entries are w,mean,sd");
            comps.push_back({std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2])});
        }
        return NoiseModel::mixture(std::move(comps), {}, spec);
    }
    if (head == "atom") {
        std::vector<PointAtom> atoms;
        for (const auto& entry : split(args, ';')) {
            const auto parts = split(entry, ',');
            if (parts.size() != 2)
                throw std::invalid_argument("parse_noise: atom entries are w,loc");
            atoms.push_back({std::stod(parts[0]), std::stod(parts[1])});
        }
        return NoiseModel::mixture({}, std::move(atoms), spec);
    }
    throw std::invalid_argument("parse_noise: unknown noise spec '" + spec + "'");
}


namespace detail {

const QuadratureRule& panel_rule(int order) {
    static const QuadratureRule gl12 = gauss_legendre(12);
    static const QuadratureRule gl16 = gauss_legendre(16);
    if (order == 12) return gl12;
    if (order == 16) return gl16;
    static thread_local QuadratureRule custom;
    custom = gauss_legendre(order);
    return custom;
}

}  // namespace detail

double fisher_information_smoothed(const NoiseModel& model, double tau) {
    if (tau < 0.0) throw std::invalid_argument("fisher_information_smoothed: tau must be >= 0");
    if (tau == 0.0 && model.has_atoms())
        throw UndefinedFisherError(
            "fisher_information_smoothed: point atoms have no density at tau = 0");

    // Effective Gaussian components of W + tau Z.
    struct Comp {
        double w, mu, s;
    };
    std::vector<Comp> comps;
    for (const auto& g : model.gaussian_components())
        comps.push_back({g.weight, g.mean, std::hypot(g.sd, tau)});
    for (const auto& a : model.atoms()) comps.push_back({a.weight, a.location, tau});

    double span = 0.0;
    for (const auto& c : comps) span = std::max(span, std::abs(c.mu) + 10.0 * c.s);

    const QuadratureRule grid = trapezoid_on_grid(-span, span, 4001);
    constexpr double inv_sqrt_2pi = 0.3989422804014327;
    double info = 0.0;
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
        const double x = grid.nodes[i];
        double g = 0.0, gp = 0.0;
        for (const auto& c : comps) {
            const double u = (x - c.mu) / c.s;
            const double dens = c.w * inv_sqrt_2pi / c.s * std::exp(-0.5 * u * u);
            g += dens;
            gp += -u / c.s * dens;
        }
        if (g > 1e-300) info += grid.weights[i] * gp * gp / g;
    }
    return info;
}

}  // namespace ramp
