#include "capax/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "capax/errors.hpp"

namespace capax {

using nlohmann::json;

namespace {

// Reads one JSON object, remembering which keys were consumed so the rest can
// be reported as unknown.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path))
    {
        if (!node_.is_object()) throw ConfigError(where() + ": expected an object");
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key)
    {
        seen_.insert(key);
        return node_.contains(key);
    }

    const json& get(const std::string& key)
    {
        if (!has(key)) throw ConfigError("field '" + field(key) + "': required");
        return node_.at(key);
    }

    double number(const std::string& key)
    {
        const json& v = get(key);
        if (!v.is_number()) throw ConfigError("field '" + field(key) + "': expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError("field '" + field(key) + "': must be finite");
        return d;
    }

    double positive(const std::string& key)
    {
        const double d = number(key);
        if (!(d > 0.0)) throw ConfigError("field '" + field(key) + "': must be > 0, got " + json(d).dump());
        return d;
    }

    long long integer(const std::string& key, long long min)
    {
        const json& v = get(key);
        if (!v.is_number_integer()) throw ConfigError("field '" + field(key) + "': expected an integer");
        const long long i = v.get<long long>();
        if (i < min) throw ConfigError("field '" + field(key) + "': must be >= " + std::to_string(min));
        return i;
    }

    std::string string(const std::string& key)
    {
        const json& v = get(key);
        if (!v.is_string()) throw ConfigError("field '" + field(key) + "': expected a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key)
    {
        const json& v = get(key);
        if (!v.is_array() || v.empty()) throw ConfigError("field '" + field(key) + "': expected a nonempty array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number())
                throw ConfigError("field '" + field(key) + "[" + std::to_string(i) + "]': expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    void finish() const
    {
        for (auto it = node_.begin(); it != node_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError("field '" + field(it.key()) + "': unknown key");
    }

private:
    std::string where() const { return path_.empty() ? "config" : "field '" + path_ + "'"; }

    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

ChannelSection parse_channel(Section s)
{
    ChannelSection c;
    c.type = s.string("type");
    if (c.type == "awgn" || c.type == "fading") {
        c.noise_std = s.positive("noise_std");
    } else if (c.type == "rayleigh_surrogate") {
        c.noise_std = s.positive("noise_std");
        c.fade_std = s.positive("fade_std");
    } else if (c.type == "finite") {
        const json& m = s.get("matrix");
        if (!m.is_array() || m.empty()) throw ConfigError("field 'channel.matrix': expected a nonempty array of rows");
        for (std::size_t i = 0; i < m.size(); ++i) {
            const std::string f = "channel.matrix[" + std::to_string(i) + "]";
            if (!m[i].is_array()) throw ConfigError("field '" + f + "': expected an array of numbers");
            std::vector<double> row;
            for (const auto& w : m[i]) {
                if (!w.is_number()) throw ConfigError("field '" + f + "': expected an array of numbers");
                row.push_back(w.get<double>());
            }
            c.matrix.push_back(std::move(row));
        }
        try {
            FiniteChannel check(c.matrix);
        } catch (const ArgumentError& e) {
            throw ConfigError("field 'channel.matrix': " + std::string(e.what()));
        }
    } else {
        throw ConfigError("field 'channel.type': unknown channel '" + c.type +
                          "' (expected awgn, fading, rayleigh_surrogate or finite)");
    }
    s.finish();
    return c;
}

StateSection parse_state(Section s)
{
    StateSection st;
    st.gains = s.numbers("gains");
    st.probs = s.numbers("probs");
    if (st.gains.size() != st.probs.size())
        throw ConfigError("field 'state.probs': length " + std::to_string(st.probs.size()) + " differs from state.gains length " +
                          std::to_string(st.gains.size()));
    double sum = 0.0;
    for (double p : st.probs) {
        if (!(p >= 0.0)) throw ConfigError("field 'state.probs': entries must be >= 0");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("field 'state.probs': must sum to 1, got " + json(sum).dump());
    s.finish();
    return st;
}

SideInfoSection parse_side_info(Section s)
{
    SideInfoSection si;
    const std::string kind = s.string("kind");
    if (kind == "none") {
        si.kind = SideInfoKind::none;
    } else if (kind == "full") {
        si.kind = SideInfoKind::full;
    } else if (kind == "quantized") {
        si.kind = SideInfoKind::quantized;
        si.bins = static_cast<std::size_t>(s.integer("bins", 1));
    } else {
        throw ConfigError("field 'side_info.kind': unknown kind '" + kind + "' (expected none, full or quantized)");
    }
    if (si.kind != SideInfoKind::quantized && s.has("bins"))
        throw ConfigError("field 'side_info.bins': only allowed with kind quantized");
    s.finish();
    return si;
}

ConstraintSection parse_constraint(Section s)
{
    ConstraintSection c;
    c.type = s.string("type");
    c.limit = s.positive("limit");
    if (c.type == "moment") {
        c.order = s.positive("order");
    } else if (c.type != "average_power" && c.type != "peak") {
        throw ConfigError("field '" + s.field("type") + "': unknown constraint '" + c.type +
                          "' (expected average_power, peak or moment)");
    }
    s.finish();
    return c;
}

void parse_solver(Section s, RunConfig& cfg)
{
    SolverConfig& sc = cfg.solver;
    if (s.has("kkt_tol")) sc.kkt_tol = s.positive("kkt_tol");
    if (s.has("weight_tol")) sc.weight_tol = s.positive("weight_tol");
    if (s.has("merge_radius")) sc.merge_radius = s.number("merge_radius");
    if (s.has("max_outer_iters")) sc.max_outer_iters = static_cast<int>(s.integer("max_outer_iters", 1));
    if (s.has("max_ba_iters")) sc.max_ba_iters = static_cast<int>(s.integer("max_ba_iters", 1));
    if (s.has("ba_tol")) sc.ba_tol = s.positive("ba_tol");
    if (s.has("gamma_max")) sc.gamma_max = s.positive("gamma_max");
    if (s.has("location_step")) sc.location_step = s.positive("location_step");
    if (s.has("location_iters")) sc.location_iters = static_cast<int>(s.integer("location_iters", 0));
    if (s.has("insert_weight")) sc.insert_weight = s.positive("insert_weight");
    if (s.has("seed")) sc.seed = static_cast<std::uint64_t>(s.integer("seed", 0));
    if (s.has("tail_sigmas")) sc.tail_sigmas = s.positive("tail_sigmas");
    if (s.has("quadrature_points")) sc.quadrature_points = static_cast<std::size_t>(s.integer("quadrature_points", 17));
    if (s.has("verify_points")) sc.verify_points = static_cast<std::size_t>(s.integer("verify_points", 3));
    if (s.has("grid_count")) sc.default_grid_count = static_cast<std::size_t>(s.integer("grid_count", 3));
    if (s.has("domain_halfwidth")) cfg.domain_halfwidth = s.positive("domain_halfwidth");
    if (s.has("initial_grid")) {
        Section g(s.get("initial_grid"), s.field("initial_grid"));
        GridSpec spec;
        spec.lo = g.number("lo");
        spec.hi = g.number("hi");
        spec.count = static_cast<std::size_t>(g.integer("count", 3));
        g.finish();
        sc.initial_grid = spec;
    }
    s.finish();
    try {
        sc.validate();
    } catch (const ArgumentError& e) {
        throw ConfigError("section 'solver': " + std::string(e.what()));
    }
}

OutputSection parse_output(Section s)
{
    OutputSection o;
    if (s.has("report")) o.report = s.string("report");
    if (s.has("csv")) o.csv = s.string("csv");
    s.finish();
    return o;
}

}  // namespace

RunConfig parse_config(const json& document)
{
    RunConfig cfg;
    cfg.source = document;
    Section root(document, "");
    cfg.channel = parse_channel(Section(root.get("channel"), "channel"));
    if (root.has("state")) cfg.state = parse_state(Section(root.get("state"), "state"));
    if (root.has("side_info")) cfg.side_info = parse_side_info(Section(root.get("side_info"), "side_info"));
    if (root.has("constraints")) {
        const json& list = root.get("constraints");
        if (!list.is_array()) throw ConfigError("field 'constraints': expected an array");
        for (std::size_t i = 0; i < list.size(); ++i)
            cfg.constraints.push_back(parse_constraint(Section(list[i], "constraints[" + std::to_string(i) + "]")));
    }
    if (root.has("solver")) parse_solver(Section(root.get("solver"), "solver"), cfg);
    if (root.has("output")) cfg.output = parse_output(Section(root.get("output"), "output"));
    root.finish();

    const bool finite = cfg.channel.type == "finite";
    if (cfg.channel.type == "fading" && !cfg.state) throw ConfigError("field 'state': required for a fading channel");
    if (cfg.channel.type != "fading" && cfg.state)
        throw ConfigError("field 'state': only a fading channel takes a state section");
    if (finite && !cfg.constraints.empty())
        throw ConfigError("field 'constraints': a finite channel takes no constraints");
    if (!finite && cfg.constraints.empty())
        throw ConfigError("field 'constraints': at least one constraint is needed to bound the input");
    if (cfg.side_info.kind == SideInfoKind::quantized) {
        const std::size_t states = cfg.state ? cfg.state->gains.size() : 1;
        if (cfg.side_info.bins > states)
            throw ConfigError("field 'side_info.bins': " + std::to_string(cfg.side_info.bins) + " bins for " +
                              std::to_string(states) + " state values");
    }
    return cfg;
}

json parse_json_text(const std::string& text, const std::string& origin)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
}

json read_json_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_json_text(buf.str(), path);
}

void apply_override(json& document, const std::string& path, const std::string& value)
{
    if (path.empty()) throw ConfigError("override: empty parameter path");
    if (path == "side_info.bins") {
        if (value == "none" || value == "full") {
            document["side_info"] = json{{"kind", value}};
        } else {
            long long bins = 0;
            const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), bins);
            if (ec != std::errc() || end != value.data() + value.size())
                throw ConfigError("override side_info.bins: expected an integer, none or full, got '" + value + "'");
            document["side_info"] = json{{"kind", "quantized"}, {"bins", bins}};
        }
        return;
    }
    json* node = &document;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty()) throw ConfigError("override: malformed parameter path '" + path + "'");
        if (!node->is_object()) throw ConfigError("override: '" + path + "' does not name an object field");
        if (dot == std::string::npos) {
            node = &(*node)[key];
            break;
        }
        node = &(*node)[key];
        if (node->is_null()) *node = json::object();
        start = dot + 1;
    }
    long long i = 0;
    const char* b = value.data();
    const char* e = value.data() + value.size();
    if (auto [p, ec] = std::from_chars(b, e, i); ec == std::errc() && p == e) {
        *node = i;
        return;
    }
    double d = 0.0;
    if (auto [p, ec] = std::from_chars(b, e, d); ec == std::errc() && p == e) {
        *node = d;
        return;
    }
    *node = value;
}

Problem build_problem(const RunConfig& config)
{
    const auto& c = config.channel;
    if (c.type == "finite") return embedded_problem(embed_finite_channel(FiniteChannel(c.matrix)));

    KernelWithState ks = c.type == "awgn"    ? make_awgn(c.noise_std)
                         : c.type == "fading" ? make_finite_state_fading(config.state->gains, config.state->probs, c.noise_std)
                                              : make_rayleigh_surrogate(c.fade_std, c.noise_std);
    std::vector<ConstraintFunction> functions;
    std::vector<double> bounds;
    for (const auto& k : config.constraints) {
        if (k.type == "average_power") {
            functions.push_back(ConstraintFunction::average_power());
            bounds.push_back(k.limit);
        } else if (k.type == "moment") {
            functions.push_back(ConstraintFunction::custom_moment(k.order));
            bounds.push_back(k.limit);
        } else {
            // A peak amplitude restricts the alphabet; the indicator's bound
            // is then met by every admissible input.
            functions.push_back(ConstraintFunction::peak_indicator(k.limit));
            bounds.push_back(1.0);
        }
    }
    ConstraintSpec spec(std::move(functions), std::move(bounds));
    InputDomain domain = default_domain(spec, config.domain_halfwidth);
    auto side = make_side_info(config.side_info.kind, ks.state, config.side_info.bins);
    return Problem{marginalize(ks.kernel, std::move(side)), std::move(spec), std::move(domain)};
}

}  // namespace capax
