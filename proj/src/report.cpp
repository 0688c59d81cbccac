#include "bindcert/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "bindcert/errors.hpp"
#include "bindcert/hash.hpp"

namespace bindcert {

std::string hex_digest(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace bindcert

namespace bindcert::report {

namespace {

void write_string(std::string& out, const std::string& s) { out += Json(s).dump(); }

void write_json(std::string& out, const Json& j) {
    switch (j.type()) {
        case Json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                write_string(out, it.key());
                out += ':';
                write_json(out, it.value());
            }
            out += '}';
            break;
        }
        case Json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                write_json(out, j[i]);
            }
            out += ']';
            break;
        }
        case Json::value_t::number_float: {
            const double x = j.get<double>();
            out += std::isfinite(x) ? format_double(x) : "null";
            break;
        }
        default:
            out += j.dump();
    }
}

void write_value(std::string& out, const Value& v) {
    std::visit(
        [&out](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, double>) {
                out += std::isfinite(x) ? format_double(x) : "null";
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                out += std::to_string(x);
            } else if constexpr (std::is_same_v<T, bool>) {
                out += x ? "true" : "false";
            } else {
                write_string(out, x);
            }
        },
        v);
}

Value read_value(const Json& j) {
    switch (j.type()) {
        case Json::value_t::boolean: return j.get<bool>();
        case Json::value_t::number_integer:
        case Json::value_t::number_unsigned: return j.get<std::int64_t>();
        case Json::value_t::number_float: return j.get<double>();
        case Json::value_t::null: return std::nan("");
        case Json::value_t::string: return j.get<std::string>();
        default: throw std::invalid_argument("record value must be a scalar");
    }
}

}  // namespace

void CertificateRecord::put(const std::string& key, Value v) {
    for (auto& [k, old] : values) {
        if (k == key) {
            old = std::move(v);
            return;
        }
    }
    values.emplace_back(key, std::move(v));
}

void CertificateRecord::tolerance(const std::string& key, double tol) {
    for (auto& [k, old] : tolerances) {
        if (k == key) {
            old = tol;
            return;
        }
    }
    tolerances.emplace_back(key, tol);
}

const Value* CertificateRecord::find(const std::string& key) const {
    for (const auto& [k, v] : values) {
        if (k == key) return &v;
    }
    return nullptr;
}

double CertificateRecord::number(const std::string& key) const {
    const Value* v = find(key);
    if (!v) throw std::out_of_range("record has no value '" + key + "'");
    if (const auto* d = std::get_if<double>(v)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(v)) return static_cast<double>(*i);
    throw std::invalid_argument("record value '" + key + "' is not numeric");
}

CertificateRecord make_record(std::string kind, std::string name, Json inputs) {
    CertificateRecord r;
    r.kind = std::move(kind);
    r.name = std::move(name);
    r.digest = digest_of(inputs);
    r.inputs = std::move(inputs);
    return r;
}

std::string digest_of(const Json& inputs) {
    Fnv1a h;
    h.text(to_canonical(inputs));
    return "fnv1a64:" + hex_digest(h.value());
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    std::string s(buf, res.ptr);
    if (std::isfinite(x) && s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

std::string to_canonical(const Json& j) {
    std::string out;
    write_json(out, j);
    return out;
}

std::string emit_json(std::span<const CertificateRecord> records) {
    std::string out = "{\"schema\":\"";
    out += kSchemaVersion;
    out += "\",\"records\":[";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (i) out += ',';
        out += "{\"kind\":";
        write_string(out, r.kind);
        out += ",\"name\":";
        write_string(out, r.name);
        out += ",\"digest\":";
        write_string(out, r.digest);
        out += ",\"inputs\":";
        write_json(out, r.inputs);
        out += ",\"values\":{";
        for (std::size_t k = 0; k < r.values.size(); ++k) {
            if (k) out += ',';
            write_string(out, r.values[k].first);
            out += ':';
            write_value(out, r.values[k].second);
        }
        out += "},\"tolerances\":{";
        for (std::size_t k = 0; k < r.tolerances.size(); ++k) {
            if (k) out += ',';
            write_string(out, r.tolerances[k].first);
            out += ':';
            write_value(out, r.tolerances[k].second);
        }
        out += "},\"pass\":";
        out += r.pass ? "true" : "false";
        out += ",\"version\":";
        write_string(out, r.version);
        out += '}';
    }
    out += "]}";
    return out;
}

std::vector<CertificateRecord> parse_json(const std::string& text) {
    const Json doc = Json::parse(text);
    if (!doc.is_object() || doc.value("schema", "") != kSchemaVersion) {
        throw std::invalid_argument("not a report with schema " + std::string(kSchemaVersion));
    }
    std::vector<CertificateRecord> out;
    for (const auto& j : doc.at("records")) {
        CertificateRecord r;
        r.kind = j.at("kind").get<std::string>();
        r.name = j.at("name").get<std::string>();
        r.digest = j.at("digest").get<std::string>();
        r.inputs = j.at("inputs");
        for (auto it = j.at("values").begin(); it != j.at("values").end(); ++it) {
            r.values.emplace_back(it.key(), read_value(it.value()));
        }
        for (auto it = j.at("tolerances").begin(); it != j.at("tolerances").end(); ++it) {
            r.tolerances.emplace_back(it.key(), it.value().is_null() ? std::nan("") : it.value().get<double>());
        }
        r.pass = j.at("pass").get<bool>();
        r.version = j.at("version").get<std::string>();
        out.push_back(std::move(r));
    }
    return out;
}

std::string emit_convergence_csv(std::span<const onebody::SolveResult> rows) {
    if (rows.empty()) throw DomainError("convergence table needs at least one row");
    std::string out = "L,N,eigenvalue,residual,iterations\n";
    for (const auto& r : rows) {
        out += format_double(r.grid.length());
        out += ',';
        out += std::to_string(r.grid.points());
        out += ',';
        out += format_double(r.eigenvalue);
        out += ',';
        out += format_double(r.residual);
        out += ',';
        out += std::to_string(r.iterations);
        out += '\n';
    }
    return out;
}

}  // namespace bindcert::report
