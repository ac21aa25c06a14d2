#include "ksum/model_io.hpp"

#include <fstream>

#include <json.hpp>

#include "ksum/error.hpp"

namespace ksum {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw invalid_input("model: malformed matrix");
    Matrix m(j.size(), j[0].size());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (j[i].size() != m.cols()) throw invalid_input("model: ragged matrix");
        for (std::size_t c = 0; c < m.cols(); ++c) m(i, c) = j[i][c].get<double>();
    }
    return m;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open model file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw invalid_input("malformed model file " + path + ": " + e.what());
    }
    return j;
}

void save_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw invalid_input("cannot write model file: " + path);
    out << j.dump(2) << '\n';
}

PolyExpKernel kernel_from_json(const json& j) {
    return PolyExpKernel(j.at("kernel_beta").get<std::vector<double>>());
}

} // namespace

void save_ica_model(const std::string& path, const ICAModel& model) {
    json j;
    j["type"] = "ica";
    j["kernel_beta"] = std::vector<double>(model.kernel.beta().begin(),
                                           model.kernel.beta().end());
    j["center"] = model.center;
    j["bandwidths"] = model.bandwidths;
    j["whitener"] = matrix_to_json(model.whitener);
    j["unmixing"] = matrix_to_json(model.unmixing);
    save_json(path, j);
}

ICAModel load_ica_model(const std::string& path) {
    json j = load_json(path);
    ICAModel m{matrix_from_json(j.at("whitener")), matrix_from_json(j.at("unmixing")),
               Matrix(), j.at("center").get<std::vector<double>>(),
               j.at("bandwidths").get<std::vector<double>>(), kernel_from_json(j)};
    return m;
}

void save_mdh_model(const std::string& path, const MDHModel& model) {
    json j;
    j["type"] = "mdh";
    j["kernel_beta"] = std::vector<double>(model.kernel.beta().begin(),
                                           model.kernel.beta().end());
    j["v"] = model.v;
    j["b"] = model.b;
    j["alpha_final"] = model.alpha_final;
    j["density_at_b"] = model.density_at_b;
    j["separating"] = model.separating;
    j["h"] = model.h;
    save_json(path, j);
}

MDHModel load_mdh_model(const std::string& path) {
    json j = load_json(path);
    return {j.at("v").get<std::vector<double>>(),
            j.at("b").get<double>(),
            j.at("alpha_final").get<double>(),
            j.at("density_at_b").get<double>(),
            j.at("separating").get<bool>(),
            j.at("h").get<double>(),
            kernel_from_json(j)};
}

void save_ppr_model(const std::string& path, const PPRModel& model) {
    json j;
    j["type"] = "ppr";
    j["kernel_beta"] = std::vector<double>(model.kernel.beta().begin(),
                                           model.kernel.beta().end());
    j["mu"] = model.mu;
    json comps = json::array();
    for (const auto& c : model.components) {
        json jc;
        jc["w"] = c.w;
        jc["h"] = c.h;
        jc["train_proj"] = c.train_proj;
        jc["train_resid"] = c.train_resid;
        comps.push_back(std::move(jc));
    }
    j["components"] = std::move(comps);
    save_json(path, j);
}

PPRModel load_ppr_model(const std::string& path) {
    json j = load_json(path);
    PPRModel m{j.at("mu").get<double>(), {}, kernel_from_json(j)};
    for (const auto& jc : j.at("components")) {
        PPRComponent c;
        c.w = jc.at("w").get<std::vector<double>>();
        c.h = jc.at("h").get<double>();
        c.train_proj = jc.at("train_proj").get<std::vector<double>>();
        c.train_resid = jc.at("train_resid").get<std::vector<double>>();
        m.components.push_back(std::move(c));
    }
    return m;
}

} // namespace ksum
