#include "polysched/instance_io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace polysched {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

json polytope_to_json(const PackingPolytope& poly) {
    json out;
    out["family"] = to_string(poly.family());
    switch (poly.family()) {
        case PolytopeFamily::explicit_rows: {
            json rows = json::array();
            for (const auto& r : poly.rows()) {
                json jobs = json::array(), coefs = json::array();
                for (const auto& e : r) {
                    jobs.push_back(e.job);
                    coefs.push_back(e.coef);
                }
                rows.push_back({{"jobs", jobs}, {"coefs", coefs}});
            }
            out["rows"] = rows;
            out["num_jobs"] = poly.num_jobs();
            break;
        }
        case PolytopeFamily::identical_machines:
            out["params"] = {{"m", poly.machines()}};
            break;
        case PolytopeFamily::related_machines: {
            std::vector<double> speeds(poly.speeds().begin(), poly.speeds().begin() + poly.machines());
            out["params"] = {{"speeds", speeds}};
            break;
        }
        case PolytopeFamily::graph_cliques: {
            json edges = json::array();
            for (auto [u, v] : poly.graph().edges) edges.push_back({u, v});
            json params = {{"vertices", poly.graph().n},
                           {"edges", edges},
                           {"entity", poly.entity() == CliqueEntity::vertex ? "vertex" : "edge"}};
            if (!poly.intervals().empty()) {
                json iv = json::array();
                for (auto [a, b] : poly.intervals()) iv.push_back({a, b});
                params["intervals"] = iv;
            }
            out["params"] = params;
            break;
        }
    }
    return out;
}

PackingPolytope polytope_from_json(const json& j, int n) {
    const auto family = polytope_family_from_string(j.at("family").get<std::string>());
    switch (family) {
        case PolytopeFamily::explicit_rows: {
            std::vector<SparseRow> rows;
            for (const auto& r : j.at("rows")) {
                const auto& jobs = r.at("jobs");
                const auto& coefs = r.at("coefs");
                if (jobs.size() != coefs.size()) throw InstanceError("row jobs/coefs length mismatch");
                SparseRow row;
                for (std::size_t k = 0; k < jobs.size(); ++k)
                    row.push_back({jobs[k].get<int>(), coefs[k].get<double>()});
                rows.push_back(std::move(row));
            }
            return PackingPolytope::from_rows(j.value("num_jobs", n), std::move(rows));
        }
        case PolytopeFamily::identical_machines:
            return build_identical_machines(n, j.at("params").at("m").get<int>());
        case PolytopeFamily::related_machines:
            return build_related_machines(j.at("params").at("speeds").get<std::vector<double>>(), n);
        case PolytopeFamily::graph_cliques: {
            const auto& params = j.at("params");
            if (params.contains("intervals")) {
                std::vector<std::pair<double, double>> iv;
                for (const auto& x : params.at("intervals")) iv.emplace_back(x.at(0).get<double>(), x.at(1).get<double>());
                return build_interval_polytope(std::move(iv));
            }
            Graph g;
            g.n = params.at("vertices").get<int>();
            for (const auto& e : params.at("edges")) {
                int u = e.at(0).get<int>(), v = e.at(1).get<int>();
                if (u < 0 || v < 0 || u >= g.n || v >= g.n) throw InstanceError("graph edge out of range");
                g.edges.emplace_back(u, v);
            }
            const auto entity = params.value("entity", std::string("vertex"));
            if (entity != "vertex" && entity != "edge") throw InstanceError("unknown clique entity '" + entity + "'");
            return build_graph_clique_polytope(g, entity == "vertex" ? CliqueEntity::vertex : CliqueEntity::edge);
        }
    }
    throw InstanceError("unreachable polytope family");
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
    json doc;
    doc["format_version"] = kInstanceFormatVersion;
    doc["mode"] = to_string(inst.mode);
    json jobs = json::array();
    for (const auto& j : inst.jobs) jobs.push_back({{"id", j.id}, {"p", j.p}, {"r", j.r}});
    doc["jobs"] = jobs;
    json groups = json::array();
    for (const auto& g : inst.groups) groups.push_back({{"id", g.id}, {"members", g.members}, {"w", g.w}});
    doc["groups"] = groups;
    doc["polytope"] = polytope_to_json(inst.polytope);
    return doc.dump(1) + "\n";
}

Instance instance_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InstanceError(std::string("instance file is not valid JSON: ") + e.what());
    }
    try {
        const int version = doc.value("format_version", kInstanceFormatVersion);
        if (version != kInstanceFormatVersion)
            throw InstanceError("unsupported instance format_version " + std::to_string(version));
        Instance inst;
        inst.mode = mode_from_string(doc.value("mode", std::string("preemptive_psp")));
        for (const auto& j : doc.at("jobs"))
            inst.jobs.push_back({j.at("id").get<int>(), j.at("p").get<double>(), j.value("r", 0.0)});
        for (const auto& g : doc.at("groups"))
            inst.groups.push_back({g.at("id").get<int>(), g.at("members").get<std::vector<int>>(), g.at("w").get<double>()});
        inst.polytope = polytope_from_json(doc.at("polytope"), inst.num_jobs());
        return inst;
    } catch (const json::exception& e) {
        throw InstanceError(std::string("malformed instance file: ") + e.what());
    }
}

Instance read_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InstanceError("cannot read instance file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return instance_from_json(ss.str());
}

void write_instance(const std::string& path, const Instance& inst) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << instance_to_json(inst);
}

void write_trace_csv(std::ostream& os, const ScheduleTrace& trace) {
    os << "segment_start,segment_end,job_id,rate\n";
    for (const auto& seg : trace.segments)
        for (const auto& e : seg.rates)
            os << format_double(seg.start) << ',' << format_double(seg.end) << ',' << e.job << ','
               << format_double(e.coef) << '\n';
}

void write_group_csv(std::ostream& os, const ScheduleTrace& trace, const Instance& inst) {
    os << "group_id,completion,weighted_cost\n";
    for (const auto& g : inst.groups) {
        const double c = trace.group_completion.at(g.id);
        os << g.id << ',' << format_double(c) << ',' << format_double(g.w * c) << '\n';
    }
}

std::string group_csv_path(const std::string& trace_path) {
    auto dot = trace_path.rfind('.');
    auto slash = trace_path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return trace_path + ".groups.csv";
    return trace_path.substr(0, dot) + ".groups" + trace_path.substr(dot);
}

void write_trace_files(const std::string& trace_path, const ScheduleTrace& trace, const Instance& inst) {
    std::ofstream t(trace_path);
    if (!t) throw std::runtime_error("cannot write '" + trace_path + "'");
    write_trace_csv(t, trace);
    std::ofstream g(group_csv_path(trace_path));
    if (!g) throw std::runtime_error("cannot write '" + group_csv_path(trace_path) + "'");
    write_group_csv(g, trace, inst);
}

}  // namespace polysched
