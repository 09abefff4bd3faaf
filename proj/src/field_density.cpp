#include "csl/field_density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace csl {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

void require_grid_match(const FieldProfile& f, const ModeGrid& grid, const char* who) {
    if (f.f_tilde.size() != grid.size())
        throw std::invalid_argument(std::string(who) + ": profile and grid sizes differ");
}

double center_scale(double omega, const ModelParams& params, bool omega_approx_m) {
    return std::sqrt(2.0 / (omega_approx_m ? params.m : omega));
}

// log((1/2) sum exp(e_ss')) over the four clump-pair exponents
DMElementLog half_log_sum_exp(const double (&e)[2][2]) {
    double peak = -std::numeric_limits<double>::infinity();
    for (const auto& row : e)
        for (double v : row) peak = std::max(peak, v);
    DMElementLog out;
    if (!std::isfinite(peak)) {
        out.log_magnitude = -std::numeric_limits<double>::infinity();
        return out;
    }
    double acc = 0.0;
    for (const auto& row : e)
        for (double v : row) acc += std::exp(v - peak);
    out.log_magnitude = std::log(0.5) + peak + std::log(acc);
    return out;
}

const ClumpProfile& clump_of(const ClumpPair& pair, int index_1based) {
    if (index_1based == 1) return pair.left;
    if (index_1based == 2) return pair.right;
    throw std::invalid_argument("clump index must be 1 or 2");
}

}  // namespace

std::vector<double> x_lattice(const ModeGrid& grid) {
    const std::size_t m = 2 * grid.size();
    const double box = kTwoPi / grid.dk;
    const double dx = box / static_cast<double>(m);
    std::vector<double> xs(m);
    for (std::size_t i = 0; i < m; ++i) xs[i] = -0.5 * box + dx * static_cast<double>(i);
    return xs;
}

FieldProfile field_profile_from_x(const std::vector<double>& samples, const ModeGrid& grid) {
    const std::size_t n = grid.size();
    if (samples.size() != 2 * n)
        throw std::invalid_argument("field_profile_from_x: need 2*n_modes samples");
    const std::vector<double> xs = x_lattice(grid);
    const double box = kTwoPi / grid.dk;
    const double dx = box / static_cast<double>(2 * n);
    FieldProfile out;
    out.f_samples = samples;
    out.f_tilde.resize(n);
    const double scale = dx / std::sqrt(kTwoPi);
    for (std::size_t j = 0; j < n; ++j) {
        cplx acc{0.0, 0.0};
        for (std::size_t i = 0; i < samples.size(); ++i)
            acc += samples[i] * std::polar(1.0, -grid.k[j] * xs[i]);
        out.f_tilde[j] = scale * acc;
    }
    return out;
}

FieldProfile field_profile_from_k(const std::vector<cplx>& f_tilde, const ModeGrid& grid) {
    const std::size_t n = grid.size();
    if (f_tilde.size() != n)
        throw std::invalid_argument("field_profile_from_k: need n_modes components");
    const std::vector<double> xs = x_lattice(grid);
    FieldProfile out;
    out.f_tilde = f_tilde;
    out.f_samples.resize(2 * n);
    const double scale = grid.dk / std::sqrt(kTwoPi);
    for (std::size_t i = 0; i < out.f_samples.size(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            acc += 2.0 * (f_tilde[j] * std::polar(1.0, grid.k[j] * xs[i])).real();
        out.f_samples[i] = scale * acc;
    }
    return out;
}

FieldProfile clump_center_profile(const ClumpProfile& clump, const ModeGrid& grid,
                                  const ModelParams& params, bool omega_approx_m) {
    std::vector<cplx> f(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j)
        f[j] = center_scale(grid.omega[j], params, omega_approx_m) * chi_momentum(grid.k[j], clump);
    return field_profile_from_k(f, grid);
}

double h0_mode_exponent(cplx f_k, cplx fp_k, double k, double t, cplx chi_s, cplx chi_sp,
                        const ModelParams& params, bool omega_approx_m) {
    if (!(t >= 0.0)) throw std::invalid_argument("h0_mode_exponent requires t >= 0");
    const double omega = dispersion(k, params.m);
    const double dk = kTwoPi / params.box_length;
    const double c = center_scale(omega, params, omega_approx_m);
    return -params.lambda * t * dk * std::norm(f_k - fp_k) -
           dk * omega * std::norm(f_k - c * chi_s) - dk * omega * std::norm(fp_k - c * chi_sp);
}

DMElementLog h0_field_element_log(const FieldProfile& f, const FieldProfile& fp, double t,
                                  const ClumpPair& pair, const ModeGrid& grid,
                                  const ModelParams& params, bool omega_approx_m) {
    require_grid_match(f, grid, "h0_field_element_log");
    require_grid_match(fp, grid, "h0_field_element_log");
    double e[2][2];
    for (int s = 0; s < 2; ++s) {
        for (int sp = 0; sp < 2; ++sp) {
            const ClumpProfile& cs = clump_of(pair, s + 1);
            const ClumpProfile& csp = clump_of(pair, sp + 1);
            double acc = 0.0;
            for (std::size_t j = 0; j < grid.size(); ++j)
                acc += h0_mode_exponent(f.f_tilde[j], fp.f_tilde[j], grid.k[j], t,
                                        chi_momentum(grid.k[j], cs), chi_momentum(grid.k[j], csp),
                                        params, omega_approx_m);
            e[s][sp] = acc;
        }
    }
    return half_log_sum_exp(e);
}

std::pair<cplx, cplx> h0_maximizer(double k, double t, cplx chi_s, cplx chi_sp,
                                   const ModelParams& params, bool omega_approx_m) {
    const double omega = dispersion(k, params.m);
    const double c = center_scale(omega, params, omega_approx_m);
    const double lt = params.lambda * t;
    const cplx common = lt * (chi_s + chi_sp);
    const double denom = 2.0 * lt + omega;
    return {c * (common + omega * chi_s) / denom, c * (common + omega * chi_sp) / denom};
}

double h0_max_exponent(double k, double t, cplx chi_s, cplx chi_sp, const ModelParams& params,
                       bool omega_approx_m) {
    const double omega = dispersion(k, params.m);
    const double c = center_scale(omega, params, omega_approx_m);
    const double lt = params.lambda * t;
    return -c * c * lt * omega / (2.0 * lt + omega) * std::norm(chi_s - chi_sp);
}

double h0_max_limit_log(const ClumpPair& pair, const ModeGrid& grid, const ModelParams& params,
                        bool omega_approx_m) {
    double acc = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double weight = omega_approx_m ? grid.omega[j] / params.m : 1.0;
        acc -= grid.dk * weight *
               std::norm(chi_momentum(grid.k[j], pair.left) - chi_momentum(grid.k[j], pair.right));
    }
    return acc;
}

double gaussian_pair_integral(double alpha, double a, double b, double c, double d) {
    if (alpha < 0.0) throw std::domain_error("gaussian_pair_integral requires alpha >= 0");
    const double cross = a + b - c - d;
    return M_PI / (2.0 * std::sqrt(alpha + 1.0)) *
           std::exp(-0.5 * (a - b) * (a - b) - 0.5 * (c - d) * (c - d) -
                    alpha * cross * cross / (4.0 * (alpha + 1.0)));
}

double clump_basis_mode_element(int i, int j, int s, int sp, double k, double t,
                                const ClumpPair& pair, const ModelParams& params) {
    if (!(t >= 0.0)) throw std::invalid_argument("clump_basis_mode_element requires t >= 0");
    const double omega = dispersion(k, params.m);
    const double dk = kTwoPi / params.box_length;
    const double r = params.lambda * t / omega;
    const cplx ci = chi_momentum(k, clump_of(pair, i));
    const cplx cj = chi_momentum(k, clump_of(pair, j));
    const cplx cs = chi_momentum(k, clump_of(pair, s));
    const cplx csp = chi_momentum(k, clump_of(pair, sp));
    return 1.0 / (r + 1.0) *
           std::exp(-r / (2.0 * (1.0 + r)) * dk * std::norm(ci + cs - cj - csp) -
                    dk * std::norm(ci - cs) - dk * std::norm(cj - csp));
}

std::pair<double, double> clump_dm_parts(double t, const ClumpPair& pair,
                                         const ModelParams& params) {
    if (!(t >= 0.0)) throw std::invalid_argument("clump_dm_parts requires t >= 0");
    const double n = pair.left.n_particles;
    const double sep = pair.separation();
    const double sigma = pair.left.sigma;
    const double g = std::exp(-sep * sep / (8.0 * sigma * sigma));
    const double a = n * (1.0 - g);
    const double r = params.lambda * t / params.m;
    const double sbar = r / (r + 1.0);
    const double shared = 2.0 * std::exp(-a * (1.0 + 0.5 * sbar)) + std::exp(-2.0 * a);
    return {0.5 * (1.0 + shared), 0.5 * (std::exp(-2.0 * a * sbar) + shared)};
}

ClumpBasisDM clump_dm(double t, const ClumpPair& pair, const ModeGrid& grid,
                      const ModelParams& params) {
    const auto [diag, off] = clump_dm_parts(t, pair, params);
    const double kf = k_factor(t, grid, params);
    ClumpBasisDM out;
    out.elements[0][0] = out.elements[1][1] = kf * diag;
    out.elements[0][1] = out.elements[1][0] = kf * off;
    out.k_factor = kf;
    return out;
}

double k_factor(double t, const ModeGrid& grid, const ModelParams& params) {
    if (!(t >= 0.0)) throw std::invalid_argument("k_factor requires t >= 0");
    double log_k = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j)
        log_k -= std::log1p(params.lambda * t / grid.omega[j]);
    return std::exp(log_k);
}

HModeExponent h_mode_exponent(cplx f_k, cplx fp_k, double k, double t, cplx chi_s, cplx chi_sp,
                              const ModelParams& params, bool omega_approx_m) {
    if (!(t >= 0.0)) throw std::invalid_argument("h_mode_exponent requires t >= 0");
    const double omega = dispersion(k, params.m);
    const double dk = kTwoPi / params.box_length;
    const double alpha = params.lambda * t / (2.0 * omega);
    const double c = center_scale(omega, params, omega_approx_m);
    // centers (chi_s - S chi_s')/(1-S) = (1+a) chi_s - a chi_s'
    const cplx center_f = c * ((1.0 + alpha) * chi_s - alpha * chi_sp);
    const cplx center_fp = c * ((1.0 + alpha) * chi_sp - alpha * chi_s);
    // 2Sw/(1-S^2) = 2wa(1+a)/(1+2a); w(1-S)/(1+S) = w/(1+2a); 2S/(1-S) = 2a
    const double diff_coeff = 2.0 * omega * alpha * (1.0 + alpha) / (1.0 + 2.0 * alpha);
    const double center_coeff = omega / (1.0 + 2.0 * alpha);
    HModeExponent out;
    out.log_gauss = -dk * diff_coeff * std::norm(f_k - fp_k) -
                    dk * center_coeff * (std::norm(f_k - center_f) + std::norm(fp_k - center_fp)) +
                    dk * 2.0 * alpha * std::norm(chi_s - chi_sp);
    out.log_prefactor = std::log(2.0 / (M_PI * (1.0 + 2.0 * alpha)));
    return out;
}

DMElementLog h_field_element_log(const FieldProfile& f, const FieldProfile& fp, double t,
                                 const ClumpPair& pair, const ModeGrid& grid,
                                 const ModelParams& params, bool omega_approx_m) {
    require_grid_match(f, grid, "h_field_element_log");
    require_grid_match(fp, grid, "h_field_element_log");
    double e[2][2];
    for (int s = 0; s < 2; ++s) {
        for (int sp = 0; sp < 2; ++sp) {
            const ClumpProfile& cs = clump_of(pair, s + 1);
            const ClumpProfile& csp = clump_of(pair, sp + 1);
            double acc = 0.0;
            for (std::size_t j = 0; j < grid.size(); ++j)
                acc += h_mode_exponent(f.f_tilde[j], fp.f_tilde[j], grid.k[j], t,
                                       chi_momentum(grid.k[j], cs), chi_momentum(grid.k[j], csp),
                                       params, omega_approx_m)
                           .log_gauss;
            e[s][sp] = acc;
        }
    }
    return half_log_sum_exp(e);
}

double h_long_time_exponent(cplx f_k, cplx fp_k, double k, double t, cplx chi_s, cplx chi_sp,
                            const ModelParams& params) {
    if (!(t > 0.0)) throw std::invalid_argument("h_long_time_exponent requires t > 0");
    const double omega = dispersion(k, params.m);
    const double dk = kTwoPi / params.box_length;
    const double lt = params.lambda * t;
    const cplx df = f_k - fp_k;
    const cplx dchi = chi_s - chi_sp;
    return -0.5 * lt * dk * std::norm(df) +
           std::sqrt(2.0 * params.m) * dk * (df * std::conj(dchi)).real() -
           dk / lt * omega * omega * (std::norm(f_k) + std::norm(fp_k)) - dk * std::norm(dchi);
}

bool long_time_smoothness_ok(const FieldProfile& f, const ModeGrid& grid, double t,
                             const ModelParams& params) {
    require_grid_match(f, grid, "long_time_smoothness_ok");
    double peak = 0.0;
    for (const cplx& v : f.f_tilde) peak = std::max(peak, std::abs(v));
    const double lt = params.lambda * t;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        if (std::abs(f.f_tilde[j]) > 1e-12 * peak && lt < 2e3 * grid.omega[j]) return false;
    }
    return true;
}

}  // namespace csl
