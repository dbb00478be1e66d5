#include "mrnn/checkpoint.hpp"

#include "mrnn/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace mrnn {

using nlohmann::json;

namespace {

json matrix_json(const Matrix& m) {
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", to_row_major(m)}};
}

Matrix matrix_from(const json& j) {
    return from_row_major(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>(),
                          j.at("data").get<std::vector<double>>());
}

json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vector_from(const json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& ckpt) {
    const ModelParams& p = ckpt.params;
    json doc;
    doc["format"] = "markovian-rnn-checkpoint";
    doc["format_version"] = kCheckpointVersion;
    doc["shapes"] = {{"num_regimes", p.num_regimes()},
                     {"hidden_dim", p.hidden_dim()},
                     {"input_dim", p.input_dim()},
                     {"output_dim", p.output_dim()},
                     {"input_features", ckpt.input_features()}};
    doc["regime_input_weights"] = json::array();
    doc["regime_recurrent_weights"] = json::array();
    for (int k = 0; k < p.num_regimes(); ++k) {
        doc["regime_input_weights"].push_back(matrix_json(p.regime_input_weights[k]));
        doc["regime_recurrent_weights"].push_back(matrix_json(p.regime_recurrent_weights[k]));
    }
    doc["output_weights"] = matrix_json(p.output_weights);
    doc["transition"] = matrix_json(p.transition);
    const Hyperparams& hp = ckpt.hp;
    doc["hyperparams"] = {{"num_regimes", hp.num_regimes},
                          {"hidden_dim", hp.hidden_dim},
                          {"truncation", hp.truncation},
                          {"learning_rate", hp.learning_rate},
                          {"dirichlet_rho0", hp.dirichlet_rho0},
                          {"max_epochs", hp.max_epochs},
                          {"early_stop_tolerance", hp.early_stop_tolerance},
                          {"clip_norm", hp.clip_norm},
                          {"transition_update", to_string(hp.transition_update)},
                          {"seed", hp.seed}};
    doc["switch_config"] = {{"beta", ckpt.config.beta},
                            {"likelihood", to_string(ckpt.config.likelihood)},
                            {"cov_floor", ckpt.config.cov_floor},
                            {"likelihood_floor", ckpt.config.likelihood_floor}};
    doc["scaler"] = {{"input_mean", vector_json(ckpt.scaler.input_mean)},
                     {"input_scale", vector_json(ckpt.scaler.input_scale)},
                     {"target_mean", vector_json(ckpt.scaler.target_mean)},
                     {"target_scale", vector_json(ckpt.scaler.target_scale)}};
    return doc.dump(2);
}

Checkpoint checkpoint_from_json(const std::string& text) {
    Checkpoint ckpt;
    try {
        const json doc = json::parse(text);
        if (doc.at("format").get<std::string>() != "markovian-rnn-checkpoint")
            throw ConfigError("not a markovian-rnn checkpoint");
        const int version = doc.at("format_version").get<int>();
        if (version != kCheckpointVersion)
            throw ConfigError("unsupported checkpoint format_version " + std::to_string(version));

        ModelParams& p = ckpt.params;
        for (const auto& m : doc.at("regime_input_weights")) p.regime_input_weights.push_back(matrix_from(m));
        for (const auto& m : doc.at("regime_recurrent_weights")) p.regime_recurrent_weights.push_back(matrix_from(m));
        p.output_weights = matrix_from(doc.at("output_weights"));
        p.transition = matrix_from(doc.at("transition"));

        const auto& h = doc.at("hyperparams");
        ckpt.hp.num_regimes = h.at("num_regimes").get<int>();
        ckpt.hp.hidden_dim = h.at("hidden_dim").get<int>();
        ckpt.hp.truncation = h.at("truncation").get<int>();
        ckpt.hp.learning_rate = h.at("learning_rate").get<double>();
        ckpt.hp.dirichlet_rho0 = h.at("dirichlet_rho0").get<double>();
        ckpt.hp.max_epochs = h.at("max_epochs").get<int>();
        ckpt.hp.early_stop_tolerance = h.at("early_stop_tolerance").get<int>();
        ckpt.hp.clip_norm = h.at("clip_norm").get<double>();
        ckpt.hp.transition_update = transition_update_from_string(h.at("transition_update").get<std::string>());
        ckpt.hp.seed = h.at("seed").get<std::uint64_t>();

        const auto& s = doc.at("switch_config");
        ckpt.config.beta = s.at("beta").get<double>();
        ckpt.config.likelihood = likelihood_kind_from_string(s.at("likelihood").get<std::string>());
        ckpt.config.cov_floor = s.at("cov_floor").get<double>();
        ckpt.config.likelihood_floor = s.at("likelihood_floor").get<double>();

        const auto& sc = doc.at("scaler");
        ckpt.scaler.input_mean = vector_from(sc.at("input_mean"));
        ckpt.scaler.input_scale = vector_from(sc.at("input_scale"));
        ckpt.scaler.target_mean = vector_from(sc.at("target_mean"));
        ckpt.scaler.target_scale = vector_from(sc.at("target_scale"));

        const auto& shapes = doc.at("shapes");
        if (shapes.at("num_regimes").get<int>() != p.num_regimes() ||
            shapes.at("hidden_dim").get<int>() != p.hidden_dim() ||
            shapes.at("input_dim").get<int>() != p.input_dim() ||
            shapes.at("output_dim").get<int>() != p.output_dim())
            throw ConfigError("checkpoint shapes disagree with its weight payload");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed checkpoint: ") + e.what());
    }
    ckpt.params.validate();
    ckpt.config.validate();
    if (ckpt.scaler.input_mean.size() != ckpt.input_features() ||
        ckpt.scaler.target_mean.size() != ckpt.params.output_dim())
        throw ConfigError("checkpoint scaler does not match the model dimensions");
    return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint '" + path + "'");
    out << checkpoint_to_json(ckpt) << '\n';
    if (!out) throw IoError("failed writing checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return checkpoint_from_json(buf.str());
}

}  // namespace mrnn
