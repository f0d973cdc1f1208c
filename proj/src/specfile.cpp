#include "apm/specfile.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

namespace apm {

namespace {

using json = nlohmann::ordered_json;

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
    for (const auto& [key, value] : obj.items())
        if (!allowed.contains(key))
            throw SpecError("unknown key '" + key + "' in " + where + " (strict schema)");
}

int read_dim(const json& doc) {
    if (!doc.contains("dim") || !doc["dim"].is_number_integer())
        throw SpecError("spec needs an integer 'dim'");
    const int dim = doc["dim"].get<int>();
    if (dim < 2 || dim > kMaxDim || dim % 2 != 0)
        throw SpecError("dim must be even and within 2.." + std::to_string(kMaxDim) +
                        ", got " + std::to_string(dim));
    return dim;
}

std::vector<std::string> read_string_matrix(const json& value, int dim, const std::string& name) {
    if (!value.is_array() || static_cast<int>(value.size()) != dim)
        throw SpecError("'" + name + "' must be a " + std::to_string(dim) + "x" +
                        std::to_string(dim) + " array of expression strings");
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(dim) * dim);
    for (const auto& row : value) {
        if (!row.is_array() || static_cast<int>(row.size()) != dim)
            throw SpecError("'" + name + "' rows must each hold " + std::to_string(dim) +
                            " strings");
        for (const auto& entry : row) {
            if (!entry.is_string())
                throw SpecError("'" + name + "' entries must be expression strings");
            out.push_back(entry.get<std::string>());
        }
    }
    return out;
}

std::vector<double> read_number_matrix(const json& value, int dim, const std::string& name) {
    if (!value.is_array() || static_cast<int>(value.size()) != dim)
        throw SpecError("'" + name + "' must be a " + std::to_string(dim) + "x" +
                        std::to_string(dim) + " numeric array");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(dim) * dim);
    for (const auto& row : value) {
        if (!row.is_array() || static_cast<int>(row.size()) != dim)
            throw SpecError("'" + name + "' rows must each hold " + std::to_string(dim) +
                            " numbers");
        for (const auto& entry : row) {
            if (!entry.is_number())
                throw SpecError("'" + name + "' entries must be numbers");
            out.push_back(entry.get<double>());
        }
    }
    return out;
}

Tolerances read_tolerances(const json& value) {
    Tolerances tol;
    require_keys(value, {"algebraic", "identity_lie", "identity_chart", "classification"},
                 "tolerances");
    if (value.contains("algebraic")) tol.algebraic = value["algebraic"].get<double>();
    if (value.contains("identity_lie")) tol.identity_lie = value["identity_lie"].get<double>();
    if (value.contains("identity_chart"))
        tol.identity_chart = value["identity_chart"].get<double>();
    if (value.contains("classification"))
        tol.classification = value["classification"].get<double>();
    return tol;
}

json residual_json(double value) {
    if (std::isfinite(value)) return value;
    return "nan";
}

const char* verdict(bool pass) { return pass ? "pass" : "fail"; }

json classification_json(const ClassificationReport& report) {
    json c;
    c["residual_w0"] = residual_json(report.residual_w0);
    c["residual_w3"] = residual_json(report.residual_w3);
    c["residual_w3_twisted"] = residual_json(report.residual_w3_alt);
    c["residual_nbar"] = residual_json(report.residual_nbar);
    c["residual_nijenhuis"] = residual_json(report.residual_nij);
    c["verdicts"] = {{"w0", verdict(report.w0_pass)},
                     {"w1w2", verdict(report.w12_pass)},
                     {"w3", verdict(report.w3_pass)}};
    c["forms_agree"] = report.forms_agree;
    c["nbar_agrees_w3"] = report.nbar_agrees_w3;
    c["tolerance"] = report.tolerance;
    c["points_sampled"] = report.points_sampled;
    c["seed"] = report.seed;
    return c;
}

} // namespace

ManifoldSpec parse_spec_json(const std::string& text, const std::string& fallback_name) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        throw SpecError(std::string("spec file is not valid JSON: ") + err.what());
    }
    if (!doc.is_object()) throw SpecError("spec document must be a JSON object");

    require_keys(doc,
                 {"name", "dim", "backend", "metric", "structure", "sample_box",
                  "structure_constants", "tolerances"},
                 "spec document");

    ManifoldSpec spec;
    spec.name = doc.contains("name") ? doc["name"].get<std::string>() : fallback_name;
    const int dim = read_dim(doc);
    if (!doc.contains("backend") || !doc["backend"].is_string())
        throw SpecError("spec needs 'backend': \"chart\" or \"lie_group\"");
    const std::string backend = doc["backend"].get<std::string>();
    if (doc.contains("tolerances")) spec.tol = read_tolerances(doc["tolerances"]);

    if (!doc.contains("metric") || !doc.contains("structure"))
        throw SpecError("spec needs 'metric' and 'structure' matrices");

    if (backend == "chart") {
        if (doc.contains("structure_constants"))
            throw SpecError("'structure_constants' is a lie_group key; backend is chart");
        const auto g_src = read_string_matrix(doc["metric"], dim, "metric");
        const auto p_src = read_string_matrix(doc["structure"], dim, "structure");
        // Upper triangle is authoritative; the lower one must agree or stay
        // empty. Silent disagreements are exactly the typo class the strict
        // schema exists to catch.
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < i; ++j) {
                const auto& lower = g_src[static_cast<std::size_t>(i) * dim + j];
                const auto& upper = g_src[static_cast<std::size_t>(j) * dim + i];
                if (!lower.empty() && lower != upper)
                    throw SpecError("metric entry (" + std::to_string(i + 1) + "," +
                                    std::to_string(j + 1) +
                                    ") conflicts with its upper-triangle mirror");
            }
        std::vector<ExprPtr> g_entries(static_cast<std::size_t>(dim) * dim);
        std::vector<ExprPtr> p_entries(static_cast<std::size_t>(dim) * dim);
        const auto parse_at = [dim](const std::string& src, const std::string& what, int i,
                                    int j) {
            try {
                return parse_expr(src, dim);
            } catch (const ParseError& err) {
                throw SpecError(what + " entry (" + std::to_string(i + 1) + "," +
                                std::to_string(j + 1) + "): " + err.what());
            }
        };
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j)
                g_entries[static_cast<std::size_t>(i) * dim + j] =
                    parse_at(g_src[static_cast<std::size_t>(i) * dim + j], "metric", i, j);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                p_entries[static_cast<std::size_t>(i) * dim + j] =
                    parse_at(p_src[static_cast<std::size_t>(i) * dim + j], "structure", i, j);

        std::vector<std::array<double, 2>> box;
        if (doc.contains("sample_box")) {
            const auto& jbox = doc["sample_box"];
            if (!jbox.is_array() || static_cast<int>(jbox.size()) != dim)
                throw SpecError("'sample_box' needs one [lo, hi] pair per coordinate");
            for (const auto& pair : jbox) {
                if (!pair.is_array() || pair.size() != 2)
                    throw SpecError("'sample_box' entries must be [lo, hi] pairs");
                box.push_back({pair[0].get<double>(), pair[1].get<double>()});
            }
        }
        spec.backend = make_chart_spec(dim, std::move(g_entries), std::move(p_entries),
                                       std::move(box));
    } else if (backend == "lie_group") {
        if (doc.contains("sample_box"))
            throw SpecError("'sample_box' is a chart key; backend is lie_group");
        if (!doc.contains("structure_constants") || !doc["structure_constants"].is_array())
            throw SpecError("lie_group spec needs a 'structure_constants' array");
        std::vector<double> bracket(static_cast<std::size_t>(dim) * dim * dim, 0.0);
        std::set<std::tuple<int, int, int>> seen;
        for (const auto& record : doc["structure_constants"]) {
            if (!record.is_object())
                throw SpecError("'structure_constants' entries must be {k, i, j, value} records");
            require_keys(record, {"k", "i", "j", "value"}, "structure_constants record");
            for (const char* key : {"k", "i", "j", "value"})
                if (!record.contains(key))
                    throw SpecError(std::string("structure_constants record misses '") + key +
                                    "'");
            const int k = record["k"].get<int>();
            const int i = record["i"].get<int>();
            const int j = record["j"].get<int>();
            const double value = record["value"].get<double>();
            if (k < 1 || k > dim || i < 1 || i > dim || j < 1 || j > dim)
                throw SpecError("structure_constants indices must lie in 1.." +
                                std::to_string(dim));
            if (i >= j)
                throw SpecError("structure_constants records require i < j (antisymmetric "
                                "completion is implied)");
            if (!seen.insert({k, i, j}).second)
                throw SpecError("duplicate structure_constants record (k=" + std::to_string(k) +
                                ", i=" + std::to_string(i) + ", j=" + std::to_string(j) + ")");
            bracket[(static_cast<std::size_t>(i - 1) * dim + (j - 1)) * dim + (k - 1)] = value;
            bracket[(static_cast<std::size_t>(j - 1) * dim + (i - 1)) * dim + (k - 1)] = -value;
        }
        spec.backend = make_lie_spec(dim, std::move(bracket),
                                     read_number_matrix(doc["metric"], dim, "metric"),
                                     read_number_matrix(doc["structure"], dim, "structure"));
    } else {
        throw SpecError("backend must be \"chart\" or \"lie_group\", got \"" + backend + "\"");
    }
    return spec;
}

ManifoldSpec load_spec_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpecError("cannot open spec file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string name = path;
    if (const auto slash = name.find_last_of('/'); slash != std::string::npos)
        name = name.substr(slash + 1);
    if (const auto dot = name.find_last_of('.'); dot != std::string::npos)
        name = name.substr(0, dot);
    return parse_spec_json(buffer.str(), name);
}

std::string spec_to_json(const ManifoldSpec& spec) {
    json doc;
    doc["name"] = spec.name;
    doc["dim"] = spec.dim();
    if (spec.is_lie()) {
        const auto& lie = std::get<LieGroupSpec>(spec.backend);
        const int d = lie.dim;
        doc["backend"] = "lie_group";
        json records = json::array();
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j)
                for (int k = 0; k < d; ++k) {
                    const double v = lie.c(i, j, k);
                    if (v == 0.0) continue;
                    records.push_back(
                        {{"k", k + 1}, {"i", i + 1}, {"j", j + 1}, {"value", v}});
                }
        doc["structure_constants"] = std::move(records);
        json metric = json::array(), structure = json::array();
        for (int i = 0; i < d; ++i) {
            json grow = json::array(), prow = json::array();
            for (int j = 0; j < d; ++j) {
                grow.push_back(lie.g0[static_cast<std::size_t>(i) * d + j]);
                prow.push_back(lie.P0[static_cast<std::size_t>(i) * d + j]);
            }
            metric.push_back(std::move(grow));
            structure.push_back(std::move(prow));
        }
        doc["metric"] = std::move(metric);
        doc["structure"] = std::move(structure);
    } else {
        const auto& chart = std::get<ChartSpec>(spec.backend);
        const int d = chart.dim;
        doc["backend"] = "chart";
        json metric = json::array(), structure = json::array();
        for (int i = 0; i < d; ++i) {
            json grow = json::array(), prow = json::array();
            for (int j = 0; j < d; ++j) {
                grow.push_back(to_string(*chart.g_entries[static_cast<std::size_t>(i) * d + j]));
                prow.push_back(to_string(*chart.P_entries[static_cast<std::size_t>(i) * d + j]));
            }
            metric.push_back(std::move(grow));
            structure.push_back(std::move(prow));
        }
        doc["metric"] = std::move(metric);
        doc["structure"] = std::move(structure);
        json box = json::array();
        for (const auto& pair : chart.sample_box) box.push_back({pair[0], pair[1]});
        doc["sample_box"] = std::move(box);
    }
    return doc.dump(2) + "\n";
}

void write_spec_file(const ManifoldSpec& spec, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SpecError("cannot write spec file '" + path + "'");
    out << spec_to_json(spec);
}

std::string classification_to_json(const std::string& spec_name,
                                   const ClassificationReport& report, const ReportMeta& meta) {
    json doc;
    doc["spec_name"] = spec_name;
    doc["seed"] = meta.seed;
    doc["tool_version"] = kToolVersion;
    doc["classification"] = classification_json(report);
    doc["timing_ms"] = meta.timing_ms;
    return doc.dump(2) + "\n";
}

std::string classification_to_text(const std::string& spec_name,
                                   const ClassificationReport& report) {
    std::ostringstream out;
    out << "spec: " << spec_name << "\n";
    const auto line = [&out](const char* label, bool pass, double residual) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3e", residual);
        out << label << (pass ? "PASS" : "FAIL") << "  (residual " << buf << ")\n";
    };
    out << "W0: " << (report.w0_pass ? "PASS" : "FAIL") << "  W1⊕W2: "
        << (report.w12_pass ? "PASS" : "FAIL") << "  W3: " << (report.w3_pass ? "PASS" : "FAIL")
        << "\n";
    line("  W0     ", report.w0_pass, report.residual_w0);
    line("  W1⊕W2  ", report.w12_pass, report.residual_nij);
    line("  W3     ", report.w3_pass, report.residual_w3);
    out << "  points: " << report.points_sampled << ", tolerance: " << report.tolerance
        << ", seed: " << report.seed << "\n";
    if (!report.forms_agree || !report.nbar_agrees_w3)
        out << "  ALERT: the equivalent class criteria disagree on this input\n";
    return out.str();
}

std::string report_to_json(const TheoremReport& report, const ReportMeta& meta) {
    json doc;
    doc["spec_name"] = report.spec_name;
    doc["seed"] = report.seed;
    doc["tool_version"] = kToolVersion;
    doc["classification"] = classification_json(report.classification);
    json checks = json::array();
    for (const auto& c : report.checks) {
        json jc;
        jc["id"] = c.id;
        jc["paper_ref"] = c.reference;
        jc["status"] = to_string(c.status);
        jc["max_residual"] = residual_json(c.max_residual);
        jc["tolerance"] = c.tolerance;
        jc["samples"] = c.samples;
        if (!c.note.empty()) jc["note"] = c.note;
        checks.push_back(std::move(jc));
    }
    doc["theorems"] = std::move(checks);
    doc["timing_ms"] = meta.timing_ms;
    return doc.dump(2) + "\n";
}

std::string report_to_text(const TheoremReport& report) {
    std::ostringstream out;
    out << "spec: " << report.spec_name << " (seed " << report.seed << ")\n";
    out << "class verdicts: W0 " << (report.classification.w0_pass ? "PASS" : "FAIL")
        << ", W1⊕W2 " << (report.classification.w12_pass ? "PASS" : "FAIL") << ", W3 "
        << (report.classification.w3_pass ? "PASS" : "FAIL") << "\n";
    for (const auto& c : report.checks) {
        char buf[64];
        if (std::isfinite(c.max_residual))
            std::snprintf(buf, sizeof buf, "%.3e", c.max_residual);
        else
            std::snprintf(buf, sizeof buf, "nan");
        out << "  " << c.id;
        for (std::size_t pad = c.id.size(); pad < 18; ++pad) out << ' ';
        const char* status = to_string(c.status);
        out << status;
        for (std::size_t pad = std::string(status).size(); pad < 9; ++pad) out << ' ';
        out << "residual " << buf << " (tol " << c.tolerance << ", n=" << c.samples << ")";
        if (!c.note.empty()) out << "  [" << c.note << "]";
        out << "\n";
    }
    out << (report.any_fail ? "RESULT: FAIL\n" : "RESULT: OK\n");
    return out.str();
}

} // namespace apm
