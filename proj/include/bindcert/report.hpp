#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "bindcert/onebody.hpp"

namespace bindcert::report {

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kToolkitVersion = "0.1.0";

using Value = std::variant<double, std::int64_t, bool, std::string>;
using Json = nlohmann::ordered_json;

/// One machine-readable verification result. `kind` is one of binding, lemma1,
/// theorem, hypothesis; `inputs` echoes the fully resolved job section.
struct CertificateRecord {
    std::string kind;
    std::string name;
    std::string digest;
    Json inputs = Json::object();
    std::vector<std::pair<std::string, Value>> values;
    std::vector<std::pair<std::string, double>> tolerances;
    bool pass = false;
    std::string version = kToolkitVersion;

    /// Sets `key`, keeping the position of an existing entry.
    void put(const std::string& key, Value v);
    void tolerance(const std::string& key, double tol);
    const Value* find(const std::string& key) const;
    double number(const std::string& key) const;

    bool operator==(const CertificateRecord&) const = default;
};

/// Record with `inputs` set and `digest` computed from them.
CertificateRecord make_record(std::string kind, std::string name, Json inputs);

/// "fnv1a64:<16 hex digits>" over the canonical serialization of `inputs`.
std::string digest_of(const Json& inputs);

/// Shortest-form-independent rendering: 17 significant digits, '.' decimal
/// point regardless of locale, ".0" appended to integral values.
std::string format_double(double x);

/// Compact canonical JSON; non-finite doubles are written as null.
std::string to_canonical(const Json& j);

/// {"schema":"1","records":[...]} with fields in declaration order.
std::string emit_json(std::span<const CertificateRecord> records);
std::vector<CertificateRecord> parse_json(const std::string& text);

/// Header `L,N,eigenvalue,residual,iterations`, one row per grid.
std::string emit_convergence_csv(std::span<const onebody::SolveResult> rows);

}  // namespace bindcert::report
