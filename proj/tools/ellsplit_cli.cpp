#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ellsplit/ellsplit.hpp"

using namespace ellsplit;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kModuleError = 1, kVerification = 2, kBudget = 3, kConfig = 4 };

int exit_code(ErrorCode c)
{
    switch (c) {
    case ErrorCode::VerificationFailed: return kVerification;
    case ErrorCode::BudgetExceeded:
    case ErrorCode::PrecisionUnreachable: return kBudget;
    case ErrorCode::ConfigError:
    case ErrorCode::ParseError:
    case ErrorCode::IOError: return kConfig;
    default: return kModuleError;
    }
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IOError, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// A file path, or inline JSON text.
Json load_json(const std::string& arg)
{
    std::string text = fs::exists(arg) ? read_file(arg) : arg;
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        raise(ErrorCode::ParseError, "bad JSON in " + arg + ": " + e.what());
    }
}

CurveSpec load_curve(const std::string& arg)
{
    if (arg == "37a1") return corpus::curve_37a1();
    if (arg == "36a1") return corpus::curve_36a1();
    Json j = load_json(arg);
    if (j.is_array()) {
        if (j.size() != 5) raise(ErrorCode::ConfigError, "curve array needs [a1, a2, a3, a4, a6]");
        return CurveSpec(rational_from_json(j[0]), rational_from_json(j[1]), rational_from_json(j[2]),
                         rational_from_json(j[3]), rational_from_json(j[4]));
    }
    return curve_from_json(j);
}

VarietySpec load_variety(const std::string& arg)
{
    if (arg.rfind("corpus:", 0) == 0) return corpus_entry(arg.substr(7)).spec;
    return variety_from_json(load_json(arg));
}

void write_output(const std::string& path, const std::string& text)
{
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) raise(ErrorCode::IOError, "cannot write " + path);
    out << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string csv_quote(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string fixed(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

// FNV-1a, stable across runs
std::string cache_key(const std::string& text)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

/// Runs `compute` unless ELLSPLIT_CACHE_DIR holds a result for `key_text`.
template <class F>
Json cached(const std::string& key_text, F compute)
{
    const char* dir = std::getenv("ELLSPLIT_CACHE_DIR");
    if (!dir || !*dir) return compute();
    fs::path file = fs::path(dir) / (cache_key(key_text) + ".json");
    if (fs::exists(file)) return Json::parse(read_file(file.string()));
    Json j = compute();
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream out(file);
    if (out) out << j.dump() << "\n";
    return j;
}

std::vector<double> parse_ns(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            raise(ErrorCode::ConfigError, "bad N value '" + item + "'");
        }
        if (out.back() < 0) raise(ErrorCode::ConfigError, "N must be non-negative");
    }
    if (out.empty()) raise(ErrorCode::ConfigError, "empty N sequence");
    return out;
}

TranslateSet parse_translates(const std::string& text)
{
    if (text == "torsion") return TranslateSet::torsion();
    if (text.rfind("ball:", 0) == 0) return TranslateSet::ball(std::stod(text.substr(5)));
    if (text.rfind("finite:", 0) == 0) {
        std::vector<PowerPoint> pts;
        for (auto& p : load_json(text.substr(7))) pts.push_back(power_point_from_json(p));
        return TranslateSet::finite(std::move(pts));
    }
    raise(ErrorCode::ConfigError, "translates must be torsion, ball:EPS or finite:FILE");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"ellsplit: Property (S), splitness and unbounded-height certificates on E^g and G_m^g"};
    app.require_subcommand(1);
    app.fallthrough();
    double precision = 1e-8;
    std::string out_path;
    bool as_csv = false;
    app.add_option("--precision", precision, "target radius for heights")->check(CLI::PositiveNumber);
    app.add_option("--out", out_path, "write the primary output here");
    auto* json_flag = app.add_flag("--json", "JSON output (default)");
    app.add_flag("--csv", as_csv, "CSV output where supported")->excludes(json_flag);

    // height
    auto* height = app.add_subcommand("height", "canonical height of a point");
    std::string curve_arg = "37a1", point_arg, method = "local";
    height->add_option("--curve", curve_arg, "37a1, 36a1, [a1,a2,a3,a4,a6] or curve JSON");
    height->add_option("--point", point_arg, "point JSON or file")->required();
    height->add_option("--method", method, "doubling|local|both");

    // check-property-s
    auto* checks = app.add_subcommand("check-property-s", "bounded check of Property (S^n)");
    std::string variety_arg;
    int n = 0;
    double bound = 1.0;
    checks->add_option("--variety", variety_arg, "variety JSON or corpus:NAME")->required();
    checks->add_option("--n", n)->check(CLI::NonNegativeNumber);
    checks->add_option("--bound", bound)->check(CLI::NonNegativeNumber);

    // find-dominant-projection
    auto* dominant = app.add_subcommand("find-dominant-projection", "coordinates on which V projects dominantly");
    bool brute = false;
    dominant->add_option("--variety", variety_arg)->required();
    dominant->add_flag("--brute-force", brute, "also list every dominant subset");

    // enumerate-subgroups
    auto* enumerate = app.add_subcommand("enumerate-subgroups", "Hermite representatives of r x g matrices");
    std::size_t r = 1, g = 1;
    std::string order_name = "Z";
    enumerate->add_option("--r", r)->required();
    enumerate->add_option("--g", g)->required();
    enumerate->add_option("--bound", bound);
    enumerate->add_option("--order", order_name, "Z, gaussian or eisenstein");

    // search-sr
    auto* search = app.add_subcommand("search-sr", "memberships of sample points in S_r(V, F)");
    std::string points_arg, translates = "torsion";
    search->add_option("--variety", variety_arg)->required();
    search->add_option("--points", points_arg, "array of point tuples")->required();
    search->add_option("--r", r)->required();
    search->add_option("--bound", bound);
    search->add_option("--translates", translates, "torsion, ball:EPS or finite:FILE");

    // unbounded-run
    auto* run = app.add_subcommand("unbounded-run", "certified points of unbounded height");
    std::string ns_text = "2,4,8,16,32,64,128", curve_check;
    std::size_t count = 3;
    double base_bound = 2.0;
    run->add_option("--variety", variety_arg, "corpus entry with fibration data")->required();
    run->add_option("--curve", curve_check, "expected curve of the variety");
    run->add_option("--N", ns_text, "comma separated bounds");
    run->add_option("--count", count);
    run->add_option("--base-bound", base_bound, "bound for the base point certificate");

    // verify-certificate
    auto* verify = app.add_subcommand("verify-certificate", "re-check a certificate from scratch");
    std::string cert_arg;
    verify->add_option("certificate", cert_arg)->required();
    verify->add_option("--variety", variety_arg, "defaults to the corpus entry named in the certificate");

    auto* list = app.add_subcommand("corpus-list", "built-in varieties");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (height->parsed()) {
            Curve c(load_curve(curve_arg));
            CurvePoint p = point_from_json(load_json(point_arg));
            HeightEngine e(c.spec());
            auto h = e.canonical(p, precision, height_method_from_string(method));
            Json j = to_json(h);
            j["torsion"] = is_torsion(c, p).torsion;
            write_output(out_path, dump(j));
        } else if (checks->parsed()) {
            VarietySpec spec = load_variety(variety_arg);
            Json key{{"cmd", "check-property-s"}, {"variety", to_json(spec)}, {"n", n}, {"bound", bound}};
            Json j = cached(key.dump(), [&] { return to_json(check_property_S(Variety(spec), n, bound)); });
            write_output(out_path, dump(j));
        } else if (dominant->parsed()) {
            VarietySpec spec = load_variety(variety_arg);
            Json key{{"cmd", "find-dominant-projection"}, {"variety", to_json(spec)}, {"brute", brute}};
            Json j = cached(key.dump(), [&] {
                Variety v(spec);
                auto one = [](std::vector<std::size_t> s) {
                    for (auto& i : s) ++i;
                    return s;
                };
                Json out{{"variety", v.name()}, {"dimension", v.dimension()},
                         {"projection", one(find_dominant_projection(v))}};
                if (brute) {
                    Json all = Json::array();
                    for (auto& s : dominant_projections_brute_force(v)) all.push_back(one(s));
                    out["all_dominant"] = all;
                }
                return out;
            });
            write_output(out_path, dump(j));
        } else if (enumerate->parsed()) {
            Order o = order_name == "gaussian" ? Order::Gaussian
                      : order_name == "eisenstein" ? Order::Eisenstein
                      : order_name == "Z" ? Order::Z
                      : (raise(ErrorCode::ConfigError, "unknown order " + order_name), Order::Z);
            auto reps = hermite_enumerate(r, g, bound, o);
            if (as_csv) {
                std::string text = "index,matrix\n";
                for (std::size_t i = 0; i < reps.size(); ++i)
                    text += std::to_string(i) + "," + csv_quote(to_json(reps[i]).dump()) + "\n";
                write_output(out_path, text);
            } else {
                Json arr = Json::array();
                for (auto& m : reps) arr.push_back(to_json(m));
                write_output(out_path, dump(Json{{"r", r}, {"g", g}, {"bound", bound}, {"count", reps.size()},
                                                 {"matrices", arr}}));
            }
        } else if (search->parsed()) {
            Variety v(load_variety(variety_arg));
            std::vector<PowerPoint> sample;
            for (auto& p : load_json(points_arg)) sample.push_back(power_point_from_json(p));
            auto recs = search_sr(v, sample, r, bound, parse_translates(translates));
            if (as_csv) {
                std::string text = "point_index,candidate_index,certificate,exact_zero\n";
                for (auto& rec : recs)
                    text += std::to_string(rec.point_index) + "," + std::to_string(rec.candidate_index) + "," +
                            csv_quote(to_json(rec.certificate).dump()) + "," + (rec.exact_zero ? "true" : "false") +
                            "\n";
                write_output(out_path, text);
            } else {
                Json arr = Json::array();
                for (auto& rec : recs) arr.push_back(to_json(rec));
                write_output(out_path, dump(Json{{"variety", v.name()}, {"r", r}, {"bound", bound},
                                                 {"translates", translates}, {"records", arr}}));
            }
        } else if (run->parsed()) {
            std::string name = variety_arg.rfind("corpus:", 0) == 0 ? variety_arg.substr(7) : variety_arg;
            const auto& entry = corpus_entry(name);
            if (!entry.fibration) raise(ErrorCode::FiberSolveUnsupported, name + " has no fibration data");
            if (!curve_check.empty() && !(load_curve(curve_check) == *entry.spec.curve))
                raise(ErrorCode::ConfigError, "variety " + name + " is not over curve " + curve_check);
            auto f = check_fibration(*entry.fibration);
            auto bp = find_base_point(f, base_bound, precision);
            auto certs = generate_unbounded(f, bp, parse_ns(ns_text), count, precision);
            bool all_ok = true;
            for (auto& c : certs) all_ok = all_ok && c.verified();
            if (as_csv || (!out_path.empty() && fs::path(out_path).extension() == ".csv")) {
                std::string text = "N,column,point,seminorm,radius,bound,verified\n";
                for (auto& c : certs)
                    text += fixed(c.N) + "," + csv_quote(Json(c.column).dump()) + "," +
                            csv_quote(to_json(c.point).dump()) + "," + fixed(c.norm.value()) + "," +
                            fixed(c.norm.radius()) + "," + fixed(c.bound()) + "," +
                            (c.verified() ? "true" : "false") + "\n";
                write_output(out_path, text);
            } else {
                Json arr = Json::array();
                for (auto& c : certs) arr.push_back(to_json(c));
                write_output(out_path, dump(Json{{"variety", name}, {"base_point", to_json(bp.x1)},
                                                 {"phi1", to_json(bp.phi1)}, {"k", bp.k},
                                                 {"zk_norm", to_json(bp.zk_norm)}, {"certificates", arr}}));
            }
            if (!all_ok) return kVerification;
        } else if (verify->parsed()) {
            Json j = load_json(cert_arg);
            auto c = certificate_from_json(j);
            VarietySpec spec = variety_arg.empty() ? corpus_entry(c.variety).spec : load_variety(variety_arg);
            Variety v(spec);
            bool ok = false;
            std::string reason;
            try {
                ok = verify_certificate(v, c);
            } catch (const Error& e) {
                // malformed claims (points off the curve, wrong shapes) fail verification
                reason = e.what();
            }
            Json out = to_json(c);
            if (!reason.empty()) out["failure"] = reason;
            write_output(out_path, dump(out));
            if (!ok) return kVerification;
        } else if (list->parsed()) {
            if (as_csv) {
                std::string text = "name,ambient,g,dimension,fibration,note\n";
                for (auto& e : corpus_entries())
                    text += e.name + "," + std::string(to_string(e.spec.ambient)) + "," + std::to_string(e.spec.g) +
                            "," + std::to_string(e.spec.claimed_dimension) + "," + (e.fibration ? "yes" : "no") +
                            "," + csv_quote(e.note) + "\n";
                write_output(out_path, text);
            } else {
                Json arr = Json::array();
                for (auto& e : corpus_entries()) {
                    Json j = to_json(e.spec);
                    j["fibration"] = e.fibration.has_value();
                    j["note"] = e.note;
                    arr.push_back(j);
                }
                write_output(out_path, dump(arr));
            }
        }
    } catch (const Error& e) {
        std::cerr << Json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}}.dump() << "\n";
        return exit_code(e.code());
    } catch (const Json::exception& e) {
        std::cerr << Json{{"error", "ParseError"}, {"message", e.what()}}.dump() << "\n";
        return kConfig;
    }
    return kOk;
}
