#include "psaa/problem_file.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace psaa {

using nlohmann::json;

namespace {

std::string ctx(const std::string &origin, const std::string &field) { return origin + ": " + field; }

SparsePoly parse_poly(const json &jterms, int n, const std::string &origin, const std::string &field) {
    if (!jterms.is_array()) throw ParseError(ctx(origin, field) + ": expected an array of terms");
    SparsePoly poly(n);
    int idx = 0;
    for (const auto &jt : jterms) {
        const std::string where = field + "[" + std::to_string(idx++) + "]";
        if (!jt.contains("exps") || !jt.contains("coef"))
            throw ParseError(ctx(origin, where) + ": term needs 'exps' and 'coef'");
        const auto exps = jt.at("exps").get<std::vector<int>>();
        if (static_cast<int>(exps.size()) != n)
            throw ParseError(ctx(origin, where) + ": exponent vector has length " +
                             std::to_string(exps.size()) + ", expected " + std::to_string(n));
        for (int e : exps)
            if (e < 0) throw ParseError(ctx(origin, where) + ": negative exponent");
        poly.add_term(MultiIndex(exps), jt.at("coef").get<double>());
    }
    return poly;
}

json poly_to_json(const SparsePoly &poly) {
    json out = json::array();
    for (const auto &[alpha, c] : poly.terms()) out.push_back({{"exps", alpha.exps()}, {"coef", c}});
    return out;
}

DistributionSpec parse_distribution(const json &jd, int r, const std::string &origin) {
    DistributionSpec spec;
    if (!jd.contains("type")) throw ParseError(ctx(origin, "distribution") + ": missing 'type'");
    const std::string type = jd.at("type").get<std::string>();
    if (type == "independent") {
        IndependentComponents ind;
        for (const auto &jc : jd.at("components")) {
            const std::string kind = jc.at("type").get<std::string>();
            if (kind == "bernoulli")
                ind.components.push_back(Bernoulli{jc.at("p").get<double>()});
            else if (kind == "geometric")
                ind.components.push_back(Geometric{jc.at("p").get<double>(), jc.value("support_start", 1)});
            else if (kind == "poisson")
                ind.components.push_back(Poisson{jc.at("lambda").get<double>()});
            else if (kind == "uniform")
                ind.components.push_back(Uniform{jc.at("a").get<double>(), jc.at("b").get<double>()});
            else
                throw ParseError(ctx(origin, "distribution.components") + ": unknown component '" + kind + "'");
        }
        spec.dist = std::move(ind);
    } else if (type == "joint_normal") {
        JointNormal jn;
        const auto mean = jd.at("mean").get<std::vector<double>>();
        jn.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<long>(mean.size()));
        const auto &jcov = jd.at("cov");
        jn.covariance.resize(static_cast<long>(jcov.size()), static_cast<long>(jcov.size()));
        for (std::size_t i = 0; i < jcov.size(); ++i) {
            const auto row = jcov[i].get<std::vector<double>>();
            if (row.size() != jcov.size())
                throw ParseError(ctx(origin, "distribution.cov") + ": covariance is not square");
            for (std::size_t j = 0; j < row.size(); ++j)
                jn.covariance(static_cast<long>(i), static_cast<long>(j)) = row[j];
        }
        spec.dist = std::move(jn);
    } else {
        throw ParseError(ctx(origin, "distribution") + ": unknown type '" + type + "'");
    }
    if (spec.dimension() != r)
        throw ParseError(ctx(origin, "distribution") + ": dimension " + std::to_string(spec.dimension()) +
                         " does not match r=" + std::to_string(r));
    try {
        spec.validate();
    } catch (const std::invalid_argument &e) {
        throw ParseError(ctx(origin, "distribution") + ": " + e.what());
    }
    return spec;
}

json distribution_to_json(const DistributionSpec &spec) {
    json out;
    if (const auto *ind = std::get_if<IndependentComponents>(&spec.dist)) {
        out["type"] = "independent";
        out["components"] = json::array();
        for (const auto &comp : ind->components) {
            json jc;
            std::visit(
                [&jc](const auto &c) {
                    using T = std::decay_t<decltype(c)>;
                    if constexpr (std::is_same_v<T, Bernoulli>) {
                        jc = {{"type", "bernoulli"}, {"p", c.p}};
                    } else if constexpr (std::is_same_v<T, Geometric>) {
                        jc = {{"type", "geometric"}, {"p", c.p}, {"support_start", c.support_start}};
                    } else if constexpr (std::is_same_v<T, Poisson>) {
                        jc = {{"type", "poisson"}, {"lambda", c.lambda}};
                    } else {
                        jc = {{"type", "uniform"}, {"a", c.a}, {"b", c.b}};
                    }
                },
                comp);
            out["components"].push_back(jc);
        }
    } else {
        const auto &jn = std::get<JointNormal>(spec.dist);
        out["type"] = "joint_normal";
        out["mean"] = std::vector<double>(jn.mean.data(), jn.mean.data() + jn.mean.size());
        json cov = json::array();
        for (long i = 0; i < jn.covariance.rows(); ++i) {
            json row = json::array();
            for (long j = 0; j < jn.covariance.cols(); ++j) row.push_back(jn.covariance(i, j));
            cov.push_back(row);
        }
        out["cov"] = cov;
    }
    return out;
}

} // namespace

std::string xi_key(const std::vector<int> &exps) {
    std::ostringstream os;
    for (std::size_t i = 0; i < exps.size(); ++i) os << (i ? "," : "") << exps[i];
    return os.str();
}

std::vector<int> parse_xi_key(const std::string &key, int r) {
    std::vector<int> exps;
    std::stringstream ss(key);
    std::string part;
    while (std::getline(ss, part, ',')) {
        std::size_t used = 0;
        const int v = std::stoi(part, &used);
        if (used != part.size() || v < 0) throw ParseError("bad xi-monomial key '" + key + "'");
        exps.push_back(v);
    }
    if (static_cast<int>(exps.size()) != r)
        throw ParseError("xi-monomial key '" + key + "' has wrong length for r=" + std::to_string(r));
    return exps;
}

XiMonomialMeans ProblemFile::preset_means(const std::string &label) const {
    auto it = fixed_average_presets.find(label);
    if (it == fixed_average_presets.end())
        throw std::invalid_argument("problem '" + name + "' has no fixed-averages preset '" + label + "'");
    return fixed_means(it->second);
}

ProblemFile parse_problem_text(const std::string &json_text, const std::string &origin) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error &e) {
        throw ParseError(origin + ": " + e.what());
    }
    ProblemFile pf;
    try {
        pf.name = j.at("name").get<std::string>();
        pf.n = j.at("n").get<int>();
        pf.r = j.at("r").get<int>();
        if (pf.n < 1 || pf.r < 1) throw ParseError(ctx(origin, "n/r") + ": must be positive");

        pf.objective.n = pf.n;
        pf.objective.r = pf.r;
        int idx = 0;
        for (const auto &jt : j.at("objective")) {
            const std::string where = "objective[" + std::to_string(idx++) + "]";
            const auto xi = jt.at("xi").get<std::vector<int>>();
            if (static_cast<int>(xi.size()) != pf.r)
                throw ParseError(ctx(origin, where + ".xi") + ": wrong length");
            for (int e : xi)
                if (e < 0) throw ParseError(ctx(origin, where + ".xi") + ": negative exponent");
            pf.objective.terms.emplace_back(MultiIndex(xi), parse_poly(jt.at("poly"), pf.n, origin, where + ".poly"));
        }
        try {
            pf.objective.validate();
        } catch (const std::invalid_argument &e) {
            throw ParseError(ctx(origin, "objective") + ": " + e.what());
        }

        idx = 0;
        for (const auto &jg : j.at("constraints")) {
            const std::string where = "constraints[" + std::to_string(idx++) + "]";
            SparsePoly gi = parse_poly(jg, pf.n, origin, where);
            if (gi.is_zero()) throw ParseError(ctx(origin, where) + ": constraint polynomial is zero");
            pf.constraints.push_back(std::move(gi));
        }

        pf.distribution = parse_distribution(j.at("distribution"), pf.r, origin);

        if (j.contains("fixed_averages")) {
            for (const auto &[label, jmap] : j.at("fixed_averages").items()) {
                std::map<std::vector<int>, double> means;
                for (const auto &[key, val] : jmap.items())
                    means[parse_xi_key(key, pf.r)] = val.get<double>();
                pf.fixed_average_presets[label] = std::move(means);
            }
        }
        if (j.contains("reference")) {
            Reference ref;
            ref.f_min = j.at("reference").at("f_min").get<double>();
            ref.v_star = j.at("reference").at("v_star").get<std::vector<double>>();
            if (static_cast<int>(ref.v_star.size()) != pf.n)
                throw ParseError(ctx(origin, "reference.v_star") + ": wrong length");
            pf.reference = std::move(ref);
        }
    } catch (const json::exception &e) {
        throw ParseError(origin + ": " + e.what());
    }
    return pf;
}

ProblemFile parse_problem(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_problem_text(ss.str(), path);
}

std::string emit_problem(const ProblemFile &pf) {
    json j;
    j["name"] = pf.name;
    j["n"] = pf.n;
    j["r"] = pf.r;
    j["objective"] = json::array();
    for (const auto &[beta, poly] : pf.objective.terms)
        j["objective"].push_back({{"xi", beta.exps()}, {"poly", poly_to_json(poly)}});
    j["constraints"] = json::array();
    for (const auto &gi : pf.constraints) j["constraints"].push_back(poly_to_json(gi));
    j["distribution"] = distribution_to_json(pf.distribution);
    if (!pf.fixed_average_presets.empty()) {
        json presets;
        for (const auto &[label, means] : pf.fixed_average_presets) {
            json jm;
            for (const auto &[exps, v] : means) jm[xi_key(exps)] = v;
            presets[label] = jm;
        }
        j["fixed_averages"] = presets;
    }
    if (pf.reference) {
        j["reference"] = {{"f_min", pf.reference->f_min}, {"v_star", pf.reference->v_star}};
    }
    return j.dump(2);
}

} // namespace psaa
