#include "risitl/tst_network.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace risitl {

int TstNetwork::total_clocks() const {
    int n = 0;
    for (const auto& p : parts) n += p.num_clocks;
    return n;
}

int TstNetwork::clock_offset(int part) const {
    int n = 0;
    for (int i = 0; i < part; ++i) n += parts[static_cast<size_t>(i)].num_clocks;
    return n;
}

void TstNetwork::check_well_formed() const {
    std::set<int> known;
    for (int p = 0; p < num_props; ++p) known.insert(p);
    bool top_seen = false;
    for (const auto& part : parts) {
        part.check_well_formed();
        if (part.output_vars.size() != 1)
            throw std::logic_error("network part must have exactly one output wire");
        for (int v : part.input_vars)
            if (!known.count(v))
                throw std::logic_error("network wiring is not topologically ordered (reads wire " +
                                       std::to_string(v) + " before it is produced)");
        known.insert(part.output_vars[0]);
        if (part.output_vars[0] == top_output) top_seen = true;
    }
    if (!top_seen) throw std::logic_error("network top output is not produced by any part");
}

TimedSignalTransducer TstNetwork::materialize() const {
    if (parts.empty()) throw std::logic_error("materialize: empty network");
    TimedSignalTransducer m = parts.back();
    // Fold remaining producers in reverse topological order; each compose
    // substitutes that producer's wire wherever the current machine reads it.
    for (int i = static_cast<int>(parts.size()) - 2; i >= 0; --i) {
        const auto& prod = parts[static_cast<size_t>(i)];
        int wire = prod.output_vars[0];
        if (std::find(m.input_vars.begin(), m.input_vars.end(), wire) == m.input_vars.end())
            continue;  // folded away
        m = io_compose(prod, m, /*reachable_only=*/true);
    }
    return m;
}

std::string TstNetwork::dump_json(const std::function<std::string(int)>& var_name) const {
    nlohmann::json j;
    j["num_props"] = num_props;
    j["top_output"] = var_name ? var_name(top_output) : "v" + std::to_string(top_output);
    j["parts"] = nlohmann::json::array();
    for (const auto& p : parts) j["parts"].push_back(nlohmann::json::parse(p.dump_json(var_name)));
    return j.dump(2);
}

}  // namespace risitl
