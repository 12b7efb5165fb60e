#pragma once
// Small shared helpers: error taxonomy, statistics, interval estimates,
// deterministic number formatting, SHA-256 for run manifests.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace baq {

// Error taxonomy maps onto CLI exit codes: config -> 2, numerical -> 3,
// infeasible request -> 4.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Wilson score interval for a binomial proportion (z = 1 gives ~68% coverage).
Interval wilson_interval(double p_hat, std::size_t n, double z = 1.0);

double mean(const std::vector<double>& xs);
double sample_variance(const std::vector<double>& xs);  // unbiased, n-1
double sample_stddev(const std::vector<double>& xs);
// Excess-free kurtosis (normal -> 3).
double kurtosis(const std::vector<double>& xs);
// Interquartile range via linear-interpolated quantiles.
double iqr(std::vector<double> xs);

// Spearman rank correlation with two-sided p-value from the t approximation.
struct SpearmanResult {
    double rho = 0.0;
    double p_value = 1.0;
};
SpearmanResult spearman(const std::vector<double>& xs, const std::vector<double>& ys);

// Fixed 12-significant-digit decimal rendering used by all CLI emitters.
std::string format12(double x);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file_hex(const std::string& path);

constexpr double kFwhmToSigma = 2.354820045030949;  // 2*sqrt(2 ln 2), divide FWHM by this

}  // namespace baq
