#include "mrnn/run_config.hpp"

#include "mrnn/csv.hpp"
#include "mrnn/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace mrnn {
namespace {

std::vector<std::string> split_on(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) parts.push_back(trim(item));
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

template <typename Int>
Int parse_integer(const std::string& key, const std::string& text) {
    const std::string s = trim(text);
    Int value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        throw ConfigError("key '" + key + "': expected an integer, got '" + text + "'");
    return value;
}

double parse_real(const std::string& key, const std::string& text) {
    try {
        return parse_double(text);
    } catch (const ConfigError&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + text + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& text) {
    std::string s = trim(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError("key '" + key + "': expected a boolean, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_on(text, ',')) out.push_back(parse_real(key, item));
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

// Rows separated by ';', entries by ','.
std::vector<std::vector<double>> parse_rows(const std::string& key, const std::string& text) {
    std::vector<std::vector<double>> rows;
    for (const auto& row : split_on(text, ';')) rows.push_back(parse_list(key, row));
    return rows;
}

Matrix rows_to_matrix(const std::string& key, const std::vector<std::vector<double>>& rows) {
    const std::size_t cols = rows.front().size();
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) throw ConfigError("key '" + key + "': ragged rows");
        for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return m;
}

std::string join_list(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += format_double(values[i]);
    }
    return out;
}

std::string join_rows(const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i) out += "; ";
        out += join_list(rows[i]);
    }
    return out;
}

std::vector<std::vector<double>> matrix_rows(const Matrix& m) {
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) rows[static_cast<std::size_t>(i)].push_back(m(i, j));
    return rows;
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace

std::pair<std::string, std::string> split_assignment(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + text + "'");
    std::string key = trim(text.substr(0, eq));
    if (key.empty()) throw ConfigError("empty key in '" + text + "'");
    return {key, trim(text.substr(eq + 1))};
}

const std::vector<std::string>& RunConfig::known_keys() {
    static const std::vector<std::string> keys{
        "kind", "length", "noise_std", "ar_coeffs", "transition", "segment_length", "periods", "magnitude",
        "initial_regime", "data_seed", "data", "timestamp_column", "value_column", "difference_all",
        "num_regimes", "hidden_dim", "truncation", "learning_rate", "rho0", "max_epochs",
        "early_stop_tolerance", "clip_norm", "transition_update", "beta", "likelihood", "cov_floor",
        "likelihood_floor", "standardize", "exclude_after_switch", "seed", "out", "checkpoint", "segment",
        "parallel"};
    return keys;
}

void RunConfig::set(const std::string& raw_key, const std::string& value) {
    const std::string key = trim(raw_key);
    if (key.rfind("sweep.", 0) == 0) {
        const std::string axis = key.substr(6);
        if (std::find(known_keys().begin(), known_keys().end(), axis) == known_keys().end())
            throw ConfigError("unknown sweep axis '" + axis + "'");
        if (axis == "out" || axis == "checkpoint" || axis == "data") throw ConfigError("cannot sweep over '" + axis + "'");
        std::vector<std::string> values;
        for (auto& v : split_on(value, ',')) {
            if (v.empty()) throw ConfigError("sweep axis '" + axis + "' has an empty value");
            RunConfig scratch = *this;
            scratch.set(axis, v);  // rejects malformed values early
            values.push_back(v);
        }
        if (values.empty()) throw ConfigError("sweep axis '" + axis + "' has no values");
        sweep_axes.erase(std::remove_if(sweep_axes.begin(), sweep_axes.end(), [&](const auto& a) { return a.first == axis; }),
                         sweep_axes.end());
        sweep_axes.emplace_back(axis, std::move(values));
        return;
    }

    if (key == "kind") {
        try {
            synthetic.kind = synthetic_kind_from_string(value);
        } catch (const ConfigError&) {
            throw ConfigError("key 'kind': unknown synthetic kind '" + value + "'");
        }
        // Kind-specific defaults only fill fields the user has not overridden.
        const SyntheticSpec d = SyntheticSpec::defaults(synthetic.kind);
        if (!noise_std_set_) synthetic.noise_std = d.noise_std;
        if (!magnitude_set_) synthetic.magnitude = d.magnitude;
    } else if (key == "length") synthetic.length = parse_integer<std::size_t>(key, value);
    else if (key == "noise_std") {
        synthetic.noise_std = parse_real(key, value);
        noise_std_set_ = true;
    }
    else if (key == "ar_coeffs") synthetic.ar_coeffs = parse_rows(key, value);
    else if (key == "transition") synthetic.transition = rows_to_matrix(key, parse_rows(key, value));
    else if (key == "segment_length") synthetic.segment_length = parse_integer<std::size_t>(key, value);
    else if (key == "periods") synthetic.periods = parse_list(key, value);
    else if (key == "magnitude") {
        synthetic.magnitude = parse_real(key, value);
        magnitude_set_ = true;
    }
    else if (key == "initial_regime") {
        if (trim(value).empty() || trim(value) == "random") synthetic.initial_regime.reset();
        else synthetic.initial_regime = parse_integer<int>(key, value);
    } else if (key == "data_seed") data_seed = parse_integer<std::uint64_t>(key, value);
    else if (key == "data") data = value;
    else if (key == "timestamp_column") schema.timestamp_column = value;
    else if (key == "value_column") schema.value_column = value;
    else if (key == "difference_all") difference_all = parse_bool(key, value);
    else if (key == "num_regimes") hp.num_regimes = parse_integer<int>(key, value);
    else if (key == "hidden_dim") hp.hidden_dim = parse_integer<int>(key, value);
    else if (key == "truncation") hp.truncation = parse_integer<int>(key, value);
    else if (key == "learning_rate") hp.learning_rate = parse_real(key, value);
    else if (key == "rho0") hp.dirichlet_rho0 = parse_real(key, value);
    else if (key == "max_epochs") hp.max_epochs = parse_integer<int>(key, value);
    else if (key == "early_stop_tolerance") hp.early_stop_tolerance = parse_integer<int>(key, value);
    else if (key == "clip_norm") hp.clip_norm = parse_real(key, value);
    else if (key == "transition_update") {
        try {
            hp.transition_update = transition_update_from_string(value);
        } catch (const ConfigError&) {
            throw ConfigError("key 'transition_update': expected softmax, logit or fixed, got '" + value + "'");
        }
    } else if (key == "beta") switching.beta = parse_real(key, value);
    else if (key == "likelihood") {
        try {
            switching.likelihood = likelihood_kind_from_string(value);
        } catch (const ConfigError&) {
            throw ConfigError("key 'likelihood': expected gaussian or laplacian, got '" + value + "'");
        }
    } else if (key == "cov_floor") switching.cov_floor = parse_real(key, value);
    else if (key == "likelihood_floor") switching.likelihood_floor = parse_real(key, value);
    else if (key == "standardize") options.standardize = parse_bool(key, value);
    else if (key == "exclude_after_switch") options.exclude_after_switch = parse_integer<std::size_t>(key, value);
    else if (key == "seed") seed = parse_integer<std::uint64_t>(key, value);
    else if (key == "out") out = value;
    else if (key == "checkpoint") checkpoint = value;
    else if (key == "segment") {
        if (value != "test" && value != "val" && value != "all")
            throw ConfigError("key 'segment': expected test, val or all, got '" + value + "'");
        segment = value;
    } else if (key == "parallel") parallel = parse_bool(key, value);
    else throw ConfigError("unknown key '" + key + "'");
}

void RunConfig::apply_text(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        try {
            const auto [key, value] = split_assignment(line);
            set(key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

void RunConfig::apply_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    apply_text(buf.str(), path);
}

SyntheticSpec RunConfig::effective_synthetic() const {
    SyntheticSpec spec = synthetic;
    spec.seed = data_seed.value_or(seed);
    return spec;
}

Hyperparams RunConfig::effective_hp() const {
    Hyperparams h = hp;
    h.seed = seed;
    return h;
}

std::string RunConfig::checkpoint_path() const { return checkpoint.empty() ? out + "/model.json" : checkpoint; }

void RunConfig::validate() const {
    if (data.empty()) effective_synthetic().validate();
    effective_hp().validate();
    switching.validate();
    if (out.empty()) throw ConfigError("key 'out' must not be empty");
    for (const auto& [axis, values] : sweep_axes) {
        for (const auto& v : values) {
            RunConfig probe = *this;
            probe.sweep_axes.clear();
            probe.set(axis, v);
            if (probe.data.empty()) probe.effective_synthetic().validate();
            probe.effective_hp().validate();
            probe.switching.validate();
        }
    }
}

std::string RunConfig::to_text() const {
    std::ostringstream o;
    auto kv = [&](const std::string& k, const std::string& v) { o << k << " = " << v << '\n'; };
    if (data.empty()) {
        kv("kind", to_string(synthetic.kind));
        kv("length", std::to_string(synthetic.length));
        kv("noise_std", format_double(synthetic.noise_std));
        kv("ar_coeffs", join_rows(synthetic.ar_coeffs));
        if (synthetic.transition.size() > 0) kv("transition", join_rows(matrix_rows(synthetic.transition)));
        kv("segment_length", std::to_string(synthetic.segment_length));
        kv("periods", join_list(synthetic.periods));
        kv("magnitude", format_double(synthetic.magnitude));
        kv("initial_regime", synthetic.initial_regime ? std::to_string(*synthetic.initial_regime) : "random");
        if (data_seed) kv("data_seed", std::to_string(*data_seed));
    } else {
        kv("data", data);
        kv("timestamp_column", schema.timestamp_column);
        kv("value_column", schema.value_column);
        kv("difference_all", bool_text(difference_all));
    }
    kv("num_regimes", std::to_string(hp.num_regimes));
    kv("hidden_dim", std::to_string(hp.hidden_dim));
    kv("truncation", std::to_string(hp.truncation));
    kv("learning_rate", format_double(hp.learning_rate));
    kv("rho0", format_double(hp.dirichlet_rho0));
    kv("max_epochs", std::to_string(hp.max_epochs));
    kv("early_stop_tolerance", std::to_string(hp.early_stop_tolerance));
    kv("clip_norm", format_double(hp.clip_norm));
    kv("transition_update", to_string(hp.transition_update));
    kv("beta", format_double(switching.beta));
    kv("likelihood", to_string(switching.likelihood));
    kv("cov_floor", format_double(switching.cov_floor));
    kv("likelihood_floor", format_double(switching.likelihood_floor));
    kv("standardize", bool_text(options.standardize));
    kv("exclude_after_switch", std::to_string(options.exclude_after_switch));
    kv("seed", std::to_string(seed));
    kv("out", out);
    if (!checkpoint.empty()) kv("checkpoint", checkpoint);
    kv("segment", segment);
    kv("parallel", bool_text(parallel));
    for (const auto& [axis, values] : sweep_axes) {
        std::string joined;
        for (std::size_t i = 0; i < values.size(); ++i) joined += (i ? ", " : "") + values[i];
        kv("sweep." + axis, joined);
    }
    return o.str();
}

}  // namespace mrnn
