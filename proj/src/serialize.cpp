#include "serialize.hpp"

#include "errors.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace orct {

using nlohmann::json;

StoredModel make_stored_model(const TrainedModel& model, const EncodingSpec& spec) {
    StoredModel sm;
    sm.task = "classification";
    sm.depth = model.topo.depth;
    sm.gamma = model.gamma;
    sm.p = model.params.p;
    sm.n_classes = model.assignment.n_classes;
    sm.a = model.params.a;
    sm.mu = model.params.mu;
    sm.c = model.assignment.c;
    sm.encoding = spec;
    return sm;
}

StoredModel make_stored_model(const RegressionModel& model, const EncodingSpec& spec) {
    StoredModel sm;
    sm.task = "regression";
    sm.depth = model.topo.depth;
    sm.gamma = model.gamma;
    sm.p = model.params.p;
    sm.phi = model.phi;
    sm.a = model.params.a;
    sm.mu = model.params.mu;
    sm.encoding = spec;
    return sm;
}

std::string model_to_json(const StoredModel& model) {
    json j;
    j["task"] = model.task;
    j["depth"] = model.depth;
    j["gamma"] = model.gamma;
    j["p"] = model.p;
    j["a"] = model.a;
    j["mu"] = model.mu;
    if (model.task == "classification") {
        j["K"] = model.n_classes;
        j["C"] = model.c;
        j["class_labels"] = model.encoding.class_labels;
    } else {
        j["phi"] = model.phi;
    }
    j["feature_scaling"] = {{"min", model.encoding.scale_min}, {"max", model.encoding.scale_max}};
    json names = json::array();
    json enc = json::array();
    for (const auto& fe : model.encoding.features) {
        names.push_back(fe.name);
        enc.push_back({{"name", fe.name},
                       {"source", fe.source},
                       {"level", fe.level},
                       {"categorical", fe.categorical}});
    }
    j["feature_names"] = names;
    j["encoding"] = enc;
    return j.dump(2) + "\n";
}

StoredModel model_from_json(const std::string& text) {
    StoredModel m;
    try {
        const json j = json::parse(text);
        m.task = j.at("task").get<std::string>();
        if (m.task != "classification" && m.task != "regression") {
            throw data_error("unknown model task '" + m.task + "'");
        }
        m.depth = j.at("depth").get<int>();
        m.gamma = j.at("gamma").get<double>();
        m.p = j.at("p").get<int>();
        m.a = j.at("a").get<std::vector<double>>();
        m.mu = j.at("mu").get<std::vector<double>>();
        if (m.task == "classification") {
            m.n_classes = j.at("K").get<int>();
            m.c = j.at("C").get<std::vector<double>>();
            m.encoding.class_labels = j.at("class_labels").get<std::vector<std::string>>();
        } else {
            m.phi = j.at("phi").get<std::vector<double>>();
            m.encoding.regression = true;
        }
        const auto& fs = j.at("feature_scaling");
        m.encoding.scale_min = fs.at("min").get<std::vector<double>>();
        m.encoding.scale_max = fs.at("max").get<std::vector<double>>();
        for (const auto& e : j.at("encoding")) {
            FeatureEncoding fe;
            fe.name = e.at("name").get<std::string>();
            fe.source = e.at("source").get<std::string>();
            fe.level = e.at("level").get<std::string>();
            fe.categorical = e.at("categorical").get<bool>();
            m.encoding.features.push_back(std::move(fe));
        }
    } catch (const json::exception& e) {
        throw data_error(std::string("invalid model JSON: ") + e.what());
    }

    const int nb = (1 << m.depth) - 1;
    const int nl = 1 << m.depth;
    if (m.depth < 1 || m.depth > kMaxDepth) throw data_error("model depth out of range");
    if (m.a.size() != static_cast<std::size_t>(m.p) * nb) throw data_error("model field 'a' has wrong size");
    if (m.mu.size() != static_cast<std::size_t>(nb)) throw data_error("model field 'mu' has wrong size");
    if (m.task == "classification" && m.c.size() != static_cast<std::size_t>(m.n_classes) * nl) {
        throw data_error("model field 'C' has wrong size");
    }
    if (m.task == "regression" && m.phi.size() != static_cast<std::size_t>(nl)) {
        throw data_error("model field 'phi' has wrong size");
    }
    if (m.encoding.features.size() != static_cast<std::size_t>(m.p) ||
        m.encoding.scale_min.size() != static_cast<std::size_t>(m.p) ||
        m.encoding.scale_max.size() != static_cast<std::size_t>(m.p)) {
        throw data_error("model encoding does not match feature count");
    }
    return m;
}

void save_model(const std::string& path, const StoredModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path);
    out << model_to_json(model);
    if (!out) throw io_error("failed writing " + path);
}

StoredModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return model_from_json(text);
}

}  // namespace orct
