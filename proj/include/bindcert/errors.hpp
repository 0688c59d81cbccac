#pragma once

#include <stdexcept>
#include <string>

namespace bindcert {

/// Argument outside the mathematical domain of an operation (e.g. B(u) for u < 0).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Requested derivative order the closed forms do not cover.
class UnsupportedOrderError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Field shapes that do not match the grid they are used with.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A singular potential sampled exactly at its singularity.
class SingularityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// State space larger than the configured cap.
class SizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// NaN/Inf produced during operator application or a broken internal invariant.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Results computed on different lattice operators were combined.
class ConsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// (H.2)/(H.3) checks failed; the instance cannot be certified.
class HypothesisError : public std::runtime_error {
public:
    HypothesisError(const std::string& what, double h2_margin, double h3_margin)
        : std::runtime_error(what), h2(h2_margin), h3(h3_margin) {}
    double h2;
    double h3;
};

/// Invalid job configuration; `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line(line) {}
    int line;
};

}  // namespace bindcert
