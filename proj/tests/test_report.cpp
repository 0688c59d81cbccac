#include "doctest.h"

#include <algorithm>
#include <clocale>
#include <cstdlib>
#include <cmath>
#include <limits>
#include <locale>

#include "bindcert/errors.hpp"
#include "bindcert/hash.hpp"
#include "bindcert/random.hpp"
#include "bindcert/report.hpp"

using namespace bindcert;
using namespace bindcert::report;

namespace {

std::string random_key(Rng& rng) {
    static const char* alphabet = "abcdefghijklmnopqrstuvwxyz_0123456789\"\\ /";
    std::string s(static_cast<std::size_t>(rng.pick(1, 10)), 'a');
    for (auto& c : s) c = alphabet[rng.pick(0, 41)];
    return s;
}

double random_double(Rng& rng) {
    switch (rng.pick(0, 5)) {
        case 0: return static_cast<double>(rng.pick(-1000, 1000));
        case 1: return rng.uniform(-1.0, 1.0) * std::pow(10.0, rng.pick(-300, 300));
        case 2: return std::numeric_limits<double>::denorm_min() * static_cast<double>(rng.pick(1, 100));
        case 3: return rng.uniform(-1.0, 1.0);
        default: return -rng.positive(1e6);
    }
}

Json random_inputs(Rng& rng, int depth) {
    Json j = Json::object();
    const int n = rng.pick(0, 4);
    for (int i = 0; i < n; ++i) {
        const std::string key = random_key(rng) + std::to_string(i);
        switch (rng.pick(0, depth > 0 ? 5 : 3)) {
            case 0: j[key] = random_double(rng); break;
            case 1: j[key] = rng.pick(-50, 50); break;
            case 2: j[key] = random_key(rng); break;
            case 3: j[key] = rng.unit() < 0.5; break;
            case 4: j[key] = random_inputs(rng, depth - 1); break;
            default: {
                Json a = Json::array();
                for (int k = rng.pick(0, 3); k > 0; --k) a.push_back(random_double(rng));
                j[key] = a;
            }
        }
    }
    return j;
}

CertificateRecord random_record(Rng& rng) {
    static const char* kinds[] = {"binding", "lemma1", "theorem", "hypothesis"};
    auto r = make_record(kinds[rng.pick(0, 3)], random_key(rng), random_inputs(rng, 2));
    for (int k = rng.pick(0, 6); k > 0; --k) {
        const std::string key = random_key(rng) + std::to_string(k);
        switch (rng.pick(0, 3)) {
            case 0: r.put(key, random_double(rng)); break;
            case 1: r.put(key, static_cast<std::int64_t>(rng.next() >> 1)); break;
            case 2: r.put(key, rng.unit() < 0.5); break;
            default: r.put(key, random_key(rng));
        }
    }
    for (int k = rng.pick(0, 3); k > 0; --k) r.tolerance(random_key(rng) + std::to_string(k), rng.positive(1e-6));
    r.pass = rng.unit() < 0.5;
    return r;
}

}  // namespace

TEST_CASE("empty report") {
    CHECK(emit_json({}) == R"({"schema":"1","records":[]})");
    CHECK(parse_json(emit_json({})).empty());
}

TEST_CASE("binding record layout") {
    auto r = make_record("binding", "solve_onebody", Json{{"L", 20.0}, {"N", 64}});
    r.put("e0", -0.5);
    r.put("binding_positive", true);
    r.put("checksum", std::string("00ff"));
    r.put("e0", -0.25);
    r.tolerance("binding_tol", 1e-6);
    r.pass = true;
    const std::vector<CertificateRecord> rs{r};
    CHECK(emit_json(rs) ==
          R"({"schema":"1","records":[{"kind":"binding","name":"solve_onebody","digest":")" + r.digest +
              R"(","inputs":{"L":20.0,"N":64},"values":{"e0":-0.25,"binding_positive":true,"checksum":"00ff"},)"
              R"("tolerances":{"binding_tol":9.9999999999999995e-07},"pass":true,"version":"0.1.0"}]})");
    CHECK(r.number("e0") == -0.25);
    CHECK_THROWS(r.number("missing"));
    CHECK_THROWS(r.number("checksum"));
}

TEST_CASE("doubles are written with 17 significant digits") {
    CHECK(format_double(0.0) == "0.0");
    CHECK(format_double(-0.0) == "-0.0");
    CHECK(format_double(1.0) == "1.0");
    CHECK(format_double(-3.0) == "-3.0");
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1e20) == "1e+20");
    CHECK(format_double(2.5e-300) == "2.5e-300");
    CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
    Rng rng(7);
    for (int i = 0; i < 20000; ++i) {
        const double x = random_double(rng);
        CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
    }
}

TEST_CASE("non-finite values become null") {
    auto r = make_record("theorem", "t", Json{{"x", std::nan("")}});
    r.put("slack", std::numeric_limits<double>::infinity());
    const std::vector<CertificateRecord> rs{r};
    const auto text = emit_json(rs);
    CHECK(text.find(R"("inputs":{"x":null})") != std::string::npos);
    CHECK(text.find(R"("slack":null)") != std::string::npos);
    const auto back = parse_json(text);
    CHECK(std::isnan(back[0].number("slack")));
    CHECK(emit_json(back) == text);
}

TEST_CASE("randomized round trip is byte identical") {
    Rng rng(20261018);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<CertificateRecord> rs;
        for (int k = rng.pick(0, 5); k > 0; --k) rs.push_back(random_record(rng));
        const auto text = emit_json(rs);
        const auto back = parse_json(text);
        REQUIRE(back.size() == rs.size());
        for (std::size_t i = 0; i < rs.size(); ++i) {
            CHECK(back[i].digest == digest_of(back[i].inputs));
            CHECK(back[i].values.size() == rs[i].values.size());
        }
        CHECK(emit_json(back) == text);
    }
}

TEST_CASE("FNV-1a reference vectors") {
    auto h = [](std::string_view s) {
        Fnv1a f;
        f.text(s);
        return hex_digest(f.value());
    };
    CHECK(h("") == "cbf29ce484222325");
    CHECK(h("a") == "af63dc4c8601ec8c");
    CHECK(h("foobar") == "85944171f73967e8");
    Fnv1a z, nz;
    z.number(0.0);
    nz.number(-0.0);
    CHECK(z.value() == nz.value());
}

TEST_CASE("digest depends on content and key order only") {
    const Json a{{"L", 20.0}, {"N", 64}};
    const Json b{{"L", 20.0}, {"N", 64}};
    const Json c{{"L", 20.000000000000004}, {"N", 64}};
    const Json d{{"N", 64}, {"L", 20.0}};
    CHECK(digest_of(a) == digest_of(b));
    CHECK(digest_of(a) != digest_of(c));
    CHECK(digest_of(a) != digest_of(d));
    CHECK(digest_of(a).rfind("fnv1a64:", 0) == 0);
    CHECK(digest_of(a).size() == 8 + 16);
    CHECK(to_canonical(a) == R"({"L":20.0,"N":64})");
}

TEST_CASE("convergence table") {
    CHECK_THROWS_AS(emit_convergence_csv({}), DomainError);
    onebody::SolveResult r;
    r.grid = GridSpec(3, 20.0, 32);
    r.eigenvalue = -0.5;
    r.residual = 1e-10;
    r.iterations = 41;
    const std::vector<onebody::SolveResult> rows{r, r};
    const auto csv = emit_convergence_csv(rows);
    CHECK(csv.rfind("L,N,eigenvalue,residual,iterations\n", 0) == 0);
    CHECK(csv.find("20.0,32,-0.5,1e-10,41\n") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("output does not depend on the global locale") {
    auto r = make_record("binding", "x", Json{{"L", 12.5}});
    r.put("e0", -1234567.25);
    const std::vector<CertificateRecord> rs{r};
    const auto before = emit_json(rs);
    const char* names[] = {"de_DE.UTF-8", "fr_FR.UTF-8", "de_DE", "C.UTF-8"};
    for (const char* name : names) {
        if (!std::setlocale(LC_ALL, name)) continue;
        CHECK(emit_json(rs) == before);
        CHECK(format_double(0.5) == "0.5");
    }
    std::setlocale(LC_ALL, "C");
}
