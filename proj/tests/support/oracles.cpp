#include "support/oracles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace oracle {

double bspline_recursive(const Eigen::VectorXd& knots, int degree, int k, double x) {
    if (degree == 0) {
        const double t_max = knots(knots.size() - 1);
        if (knots(k) <= x && x < knots(k + 1)) return 1.0;
        // Right-closed final span: the very end of the range belongs to the
        // last nonempty interval.
        if (x == t_max && knots(k) < knots(k + 1) && knots(k + 1) == t_max) return 1.0;
        return 0.0;
    }
    double value = 0.0;
    const double den_left = knots(k + degree) - knots(k);
    if (den_left > 0.0) {
        value += (x - knots(k)) / den_left * bspline_recursive(knots, degree - 1, k, x);
    }
    const double den_right = knots(k + degree + 1) - knots(k + 1);
    if (den_right > 0.0) {
        value += (knots(k + degree + 1) - x) / den_right *
                 bspline_recursive(knots, degree - 1, k + 1, x);
    }
    return value;
}

Conditional dense_conditional(const Eigen::MatrixXd& Q, const Eigen::VectorXd& b, int k) {
    const Eigen::Index K = Q.rows();
    const Eigen::Index i = k - 1;
    const Eigen::MatrixXd Sigma = Q.inverse();

    Eigen::MatrixXd S_rr(K - 1, K - 1);
    Eigen::VectorXd S_ir(K - 1);
    Eigen::VectorXd b_r(K - 1);
    Eigen::Index row = 0;
    for (Eigen::Index a = 0; a < K; ++a) {
        if (a == i) continue;
        S_ir(row) = Sigma(i, a);
        b_r(row) = b(a);
        Eigen::Index col = 0;
        for (Eigen::Index c = 0; c < K; ++c) {
            if (c == i) continue;
            S_rr(row, col++) = Sigma(a, c);
        }
        ++row;
    }
    const Eigen::MatrixXd S_rr_inv = S_rr.inverse();
    const double mean = S_ir.dot(S_rr_inv * b_r);
    const double variance = Sigma(i, i) - S_ir.dot(S_rr_inv * S_ir);
    return {mean, variance};
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t ia = 0, ib = 0;
    double d = 0.0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia] <= b[ib]) {
            ++ia;
        } else {
            ++ib;
        }
        d = std::max(d, std::abs(ia / na - ib / nb));
    }
    return d;
}

double ks_statistic_one_sample(std::vector<double> sample,
                               const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::abs(f - i / n));
        d = std::max(d, std::abs((i + 1) / n - f));
    }
    return d;
}

double kolmogorov_pvalue(double z) {
    if (z <= 0.0) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * z * z);
        sum += (j % 2 == 1 ? term : -term);
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_pvalue(double d, std::size_t n, std::size_t m) {
    const double nm = static_cast<double>(n) * static_cast<double>(m) /
                      static_cast<double>(n + m);
    return kolmogorov_pvalue(d * std::sqrt(nm));
}

double ks_pvalue_one_sample(double d, std::size_t n) {
    return kolmogorov_pvalue(d * std::sqrt(static_cast<double>(n)));
}

namespace {

/// Series expansion of the regularized lower incomplete gamma P(a, x).
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 500; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Continued-fraction expansion of the regularized upper incomplete gamma
/// Q(a, x) (modified Lentz scheme).
double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

} // namespace

double gamma_cdf(double x, double shape, double rate) {
    if (x <= 0.0) return 0.0;
    const double ax = x * rate;
    if (ax < shape + 1.0) return gamma_p_series(shape, ax);
    return 1.0 - gamma_q_contfrac(shape, ax);
}

double inv_gamma_cdf(double x, double shape, double scale) {
    if (x <= 0.0) return 0.0;
    // X = 1/G with G ~ Gamma(shape, rate = scale).
    return 1.0 - gamma_cdf(1.0 / x, shape, scale);
}

double ar1_autocov(double phi, double sd, int h) {
    return sd * sd * std::pow(phi, std::abs(h)) / (1.0 - phi * phi);
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw std::invalid_argument("total_variation: size mismatch");
    double tv = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
    return 0.5 * tv;
}

SeriesMoments series_moments(const Eigen::VectorXd& x) {
    const double n = static_cast<double>(x.size());
    const double mean = x.mean();
    const Eigen::ArrayXd centered = x.array() - mean;
    const double var = centered.square().sum() / n;
    double cov1 = 0.0;
    for (Eigen::Index t = 0; t + 1 < x.size(); ++t) cov1 += centered(t) * centered(t + 1);
    cov1 /= n;
    return {mean, std::sqrt(var), var > 0.0 ? cov1 / var : 0.0};
}

std::string cli_path() {
    if (const char* env = std::getenv("DLM_CLI")) return env;
#ifdef DLM_CLI_PATH
    return DLM_CLI_PATH;
#else
    throw std::runtime_error("cli_path: DLM_CLI is not set");
#endif
}

namespace {

std::string shell_quote(const std::string& s) {
    std::string quoted = "'";
    for (char c : s) {
        if (c == '\'') {
            quoted += "'\\''";
        } else {
            quoted += c;
        }
    }
    quoted += "'";
    return quoted;
}

std::atomic<unsigned> scratch_counter{0};

} // namespace

RunResult run_cli(const std::vector<std::string>& args) {
    const std::string dir = fresh_temp_dir("cli_run");
    const std::string out_path = dir + "/stdout.txt";
    const std::string err_path = dir + "/stderr.txt";

    std::string command = shell_quote(cli_path());
    for (const std::string& a : args) command += " " + shell_quote(a);
    command += " > " + shell_quote(out_path) + " 2> " + shell_quote(err_path);

    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = read_file(out_path);
    result.err = read_file(err_path);
    fs::remove_all(dir);
    return result;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_file: cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    fs::create_directories(fs::path(path).parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_file: cannot open " + path);
    out << content;
}

std::string fresh_temp_dir(const std::string& tag) {
    const unsigned id = scratch_counter.fetch_add(1);
    const fs::path dir = fs::temp_directory_path() /
                         ("dlm_tests_" + std::to_string(::getpid()) + "_" + tag + "_" +
                          std::to_string(id));
    fs::create_directories(dir);
    return dir.string();
}

} // namespace oracle
