#include "fabtwin/spec_io.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

#include "fabtwin/error.hpp"

namespace fabtwin {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

std::string index_path(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

// Field access over one JSON object. Every key read is recorded so that
// finish() can reject anything the schema does not know about.
class ObjectReader {
  public:
    ObjectReader(const json& value, std::string path) : obj_(value), path_(std::move(path)) {
        if (!obj_.is_object()) {
            throw Error(Errc::invalid_value, where() + ": expected an object");
        }
    }

    const json& at(const std::string& key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        if (it == obj_.end()) {
            throw Error(Errc::invalid_value, join(path_, key) + ": missing required field");
        }
        return *it;
    }

    const json* maybe(const std::string& key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        if (it == obj_.end()) return nullptr;
        return &*it;
    }

    std::string path(const std::string& key) const { return join(path_, key); }

    std::string text(const std::string& key) {
        const auto& v = at(key);
        if (!v.is_string()) throw Error(Errc::invalid_value, path(key) + ": expected a string");
        return v.get<std::string>();
    }

    double number(const std::string& key) { return as_number(at(key), path(key)); }

    bool flag(const std::string& key) {
        const auto& v = at(key);
        if (!v.is_boolean()) throw Error(Errc::invalid_value, path(key) + ": expected a boolean");
        return v.get<bool>();
    }

    std::uint32_t count(const std::string& key) { return as_count(at(key), path(key), true); }
    std::uint32_t count_or_zero(const std::string& key) { return as_count(at(key), path(key), false); }

    void finish() const {
        for (const auto& item : obj_.items()) {
            if (!seen_.count(item.key())) {
                throw Error(Errc::unknown_field, join(path_, item.key()) + ": unknown field");
            }
        }
    }

    static double as_number(const json& v, const std::string& where) {
        if (!v.is_number()) throw Error(Errc::invalid_value, where + ": expected a number");
        return v.get<double>();
    }

    static std::uint32_t as_count(const json& v, const std::string& where, bool positive) {
        if (!v.is_number_integer()) throw Error(Errc::invalid_value, where + ": expected an integer count");
        const auto n = v.get<std::int64_t>();
        if (n < 0 || (positive && n == 0)) {
            throw Error(Errc::non_positive, where + ": count must be " +
                                                (positive ? "strictly positive" : "non-negative") +
                                                ", got " + std::to_string(n));
        }
        if (n > std::numeric_limits<std::uint32_t>::max()) {
            throw Error(Errc::invalid_value, where + ": count out of range");
        }
        return static_cast<std::uint32_t>(n);
    }

  private:
    std::string where() const { return path_.empty() ? std::string("<root>") : path_; }

    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

const json& as_array(const json& v, const std::string& where) {
    if (!v.is_array()) throw Error(Errc::invalid_value, where + ": expected an array");
    return v;
}

const json& as_object(const json& v, const std::string& where) {
    if (!v.is_object()) throw Error(Errc::invalid_value, where + ": expected an object");
    return v;
}

std::map<std::string, std::uint32_t> parse_count_map(const json& v, const std::string& where) {
    std::map<std::string, std::uint32_t> out;
    for (const auto& item : as_object(v, where).items()) {
        out[item.key()] = ObjectReader::as_count(item.value(), join(where, item.key()), true);
    }
    return out;
}

RackGroup parse_rack_group(const json& v, const std::string& where) {
    ObjectReader r(v, where);
    RackGroup g;
    g.racks = r.count("racks");
    g.blades_per_rack = r.count("blades_per_rack");
    g.nodes_per_blade = r.count("nodes_per_blade");
    g.node_type = r.text("node_type");
    r.finish();
    return g;
}

CellSpec parse_cell(const json& v, const std::string& where) {
    ObjectReader r(v, where);
    CellSpec c;
    const auto& id = r.at("id");
    if (!id.is_number_integer()) throw Error(Errc::invalid_value, r.path("id") + ": expected an integer");
    c.id = id.get<int>();
    const auto kind = r.text("kind");
    auto parsed = parse_cell_kind(kind);
    if (!parsed) throw Error(Errc::invalid_value, r.path("kind") + ": unknown cell kind '" + kind + "'");
    c.kind = *parsed;
    const auto groups_path = r.path("rack_groups");
    const auto& groups = as_array(r.at("rack_groups"), groups_path);
    for (std::size_t i = 0; i < groups.size(); ++i) {
        c.rack_groups.push_back(parse_rack_group(groups[i], index_path(groups_path, i)));
    }
    c.spines = r.count("spines");
    c.leafs = r.count("leafs");
    r.finish();
    return c;
}

CpuSpec parse_cpu(const json& v, const std::string& where) {
    ObjectReader r(v, where);
    CpuSpec c;
    c.model = r.text("model");
    c.cores = r.count("cores");
    c.clock_ghz = r.number("clock_ghz");
    c.flops_per_cycle_per_core = r.count("flops_per_cycle_per_core");
    c.mem_channels = r.count("mem_channels");
    c.channel_bw_gbs = r.number("channel_bw_gbs");
    r.finish();
    return c;
}

PeakEntry parse_peak_entry(const json& v, const std::string& where) {
    ObjectReader r(v, where);
    PeakEntry e;
    const auto format = r.text("format");
    auto parsed = parse_numeric_format(format);
    if (!parsed) throw Error(Errc::invalid_value, r.path("format") + ": unknown numeric format '" + format + "'");
    e.format = *parsed;
    e.tensor = r.flag("tensor");
    const auto& value = r.at("value");
    if (!value.is_null()) e.value = ObjectReader::as_number(value, r.path("value"));
    e.sparsity_doubling = r.flag("sparsity_doubling");
    r.finish();
    return e;
}

GpuSpec parse_gpu(const json& v, const std::string& where) {
    ObjectReader r(v, where);
    GpuSpec g;
    g.model = r.text("model");
    g.sm_count = r.count("sm_count");
    g.max_clock_mhz = r.number("max_clock_mhz");
    g.hbm_gb = r.number("hbm_gb");
    g.hbm_bw_gbs = r.number("hbm_bw_gbs");
    g.tdp_w = r.number("tdp_w");
    const auto peaks_path = r.path("peaks");
    const auto& peaks = as_array(r.at("peaks"), peaks_path);
    for (std::size_t i = 0; i < peaks.size(); ++i) {
        g.peaks.entries.push_back(parse_peak_entry(peaks[i], index_path(peaks_path, i)));
    }
    r.finish();
    return g;
}

NodeSpec parse_node(const json& v, const std::string& where) {
    ObjectReader r(v, where);
    NodeSpec n;
    n.cpu = parse_cpu(r.at("cpu"), r.path("cpu"));
    const auto gpus_path = r.path("gpus");
    const auto& gpus = as_array(r.at("gpus"), gpus_path);
    for (std::size_t i = 0; i < gpus.size(); ++i) {
        n.gpus.push_back(parse_gpu(gpus[i], index_path(gpus_path, i)));
    }
    n.ram_gb = r.number("ram_gb");
    n.ram_bw_gbs = r.number("ram_bw_gbs");
    const auto ports_path = r.path("nic_ports");
    const auto& ports = as_array(r.at("nic_ports"), ports_path);
    for (std::size_t i = 0; i < ports.size(); ++i) {
        ObjectReader pr(ports[i], index_path(ports_path, i));
        NicPorts p;
        p.link_class = pr.text("link_class");
        p.count = pr.count("count");
        pr.finish();
        n.nic_ports.push_back(std::move(p));
    }
    n.pcie_per_gpu_gbs = r.number("pcie_per_gpu_gbs");
    n.nvlink_pair_gbs = r.number("nvlink_pair_gbs");
    if (const auto* dimms = r.maybe("dimms")) {
        ObjectReader dr(*dimms, r.path("dimms"));
        Dimms d;
        d.count = dr.count("count");
        d.size_gb = dr.number("size_gb");
        dr.finish();
        n.dimms = d;
    }
    r.finish();
    return n;
}

SwitchSpec parse_switch(const json& v, const std::string& where) {
    ObjectReader r(v, where);
    SwitchSpec s;
    s.model = r.text("model");
    s.radix_200g_ports = r.count("radix_200g_ports");
    s.port_to_port_ns = r.number("port_to_port_ns");
    s.split_mode_supported = r.flag("split_mode_supported");
    r.finish();
    return s;
}

LinkClass parse_link_class(const json& v, const std::string& where) {
    ObjectReader r(v, where);
    LinkClass l;
    l.name = r.text("name");
    l.rate_gbps = r.count("rate_gbps");
    l.endpoint_latency_ns = r.number("endpoint_latency_ns");
    l.length_m = r.number("length_m");
    r.finish();
    return l;
}

FabricSpec parse_fabric(const json& v, const std::string& where) {
    ObjectReader r(v, where);
    FabricSpec f;
    f.switch_type = r.text("switch_type");
    f.leaf_spine_link_class = r.text("leaf_spine_link_class");
    f.global_link_class = r.text("global_link_class");
    f.gateway_link_class = r.text("gateway_link_class");
    f.storage_hdr_link_class = r.text("storage_hdr_link_class");
    f.storage_hdr100_link_class = r.text("storage_hdr100_link_class");
    f.spine_uplinks = r.count_or_zero("spine_uplinks");
    f.spine_downlinks = r.count("spine_downlinks");
    f.gateway_ports = r.count_or_zero("gateway_ports");
    r.finish();
    return f;
}

ApplianceSpec parse_appliance(const json& v, const std::string& where) {
    ObjectReader r(v, where);
    ApplianceSpec a;
    a.count = r.count("count");
    {
        ObjectReader dr(r.at("drives"), r.path("drives"));
        a.drives.count = dr.count("count");
        a.drives.size_tb = dr.number("size_tb");
        const auto kind = dr.text("kind");
        auto parsed = parse_drive_kind(kind);
        if (!parsed) throw Error(Errc::invalid_value, dr.path("kind") + ": unknown drive kind '" + kind + "'");
        a.drives.kind = *parsed;
        dr.finish();
    }
    a.hdr_ports = r.count_or_zero("hdr_ports");
    a.hdr100_ports = r.count_or_zero("hdr100_ports");
    if (const auto* declared = r.maybe("declared_module_tb")) {
        a.declared_module_tb = ObjectReader::as_number(*declared, r.path("declared_module_tb"));
    }
    r.finish();
    return a;
}

StorageSpec parse_storage(const json& v, const std::string& where) {
    ObjectReader r(v, where);
    StorageSpec s;
    const auto appliances_path = r.path("appliances");
    for (const auto& item : as_object(r.at("appliances"), appliances_path).items()) {
        s.appliances[item.key()] = parse_appliance(item.value(), join(appliances_path, item.key()));
    }
    const auto tiers_path = r.path("tiers");
    for (const auto& item : as_object(r.at("tiers"), tiers_path).items()) {
        const auto tier_path = join(tiers_path, item.key());
        ObjectReader tr(item.value(), tier_path);
        TierSpec t;
        t.appliances = parse_count_map(tr.at("appliances"), tr.path("appliances"));
        if (const auto* declared = tr.maybe("declared_raw_pb")) {
            t.declared_raw_pb = ObjectReader::as_number(*declared, tr.path("declared_raw_pb"));
        }
        tr.finish();
        s.tiers[item.key()] = std::move(t);
    }
    const auto ns_path = r.path("namespaces");
    const auto& namespaces = as_array(r.at("namespaces"), ns_path);
    for (std::size_t i = 0; i < namespaces.size(); ++i) {
        ObjectReader nr(namespaces[i], index_path(ns_path, i));
        NamespaceSpec n;
        n.path = nr.text("path");
        n.appliance_mix = parse_count_map(nr.at("appliance_mix"), nr.path("appliance_mix"));
        n.declared_net_size_pib = nr.number("declared_net_size_pib");
        n.declared_bandwidth_gbs = nr.number("declared_bandwidth_gbs");
        nr.finish();
        s.namespaces.push_back(std::move(n));
    }
    r.finish();
    return s;
}

PowerSpec parse_power(const json& v, const std::string& where) {
    ObjectReader r(v, where);
    PowerSpec p;
    p.pue = r.number("pue");
    p.dlc_capacity_mw = r.number("dlc_capacity_mw");
    p.it_load_mw = r.number("it_load_mw");
    r.finish();
    return p;
}

void require_ref(bool found, const std::string& where, const std::string& kind, const std::string& name) {
    if (!found) {
        throw Error(Errc::unresolved_reference, where + ": unresolved " + kind + " '" + name + "'");
    }
}

void resolve_references(const MachineSpec& spec) {
    for (std::size_t c = 0; c < spec.cells.size(); ++c) {
        const auto& cell = spec.cells[c];
        for (std::size_t g = 0; g < cell.rack_groups.size(); ++g) {
            const auto& name = cell.rack_groups[g].node_type;
            require_ref(spec.node_types.count(name) > 0,
                        "cells[" + std::to_string(c) + "].rack_groups[" + std::to_string(g) + "].node_type",
                        "node_type", name);
        }
    }
    for (const auto& [type_name, node] : spec.node_types) {
        for (std::size_t i = 0; i < node.nic_ports.size(); ++i) {
            require_ref(spec.link_classes.count(node.nic_ports[i].link_class) > 0,
                        "node_types." + type_name + ".nic_ports[" + std::to_string(i) + "].link_class",
                        "link_class", node.nic_ports[i].link_class);
        }
    }
    const auto& f = spec.fabric;
    require_ref(spec.switch_types.count(f.switch_type) > 0, "fabric.switch_type", "switch_type", f.switch_type);
    const std::pair<const char*, const std::string*> classes[] = {
        {"fabric.leaf_spine_link_class", &f.leaf_spine_link_class},
        {"fabric.global_link_class", &f.global_link_class},
        {"fabric.gateway_link_class", &f.gateway_link_class},
        {"fabric.storage_hdr_link_class", &f.storage_hdr_link_class},
        {"fabric.storage_hdr100_link_class", &f.storage_hdr100_link_class},
    };
    for (const auto& [where, name] : classes) {
        require_ref(spec.link_classes.count(*name) > 0, where, "link_class", *name);
    }
    for (const auto& [tier_name, tier] : spec.storage.tiers) {
        for (const auto& [model, count] : tier.appliances) {
            require_ref(spec.storage.appliances.count(model) > 0, "storage.tiers." + tier_name + ".appliances",
                        "appliance model", model);
        }
    }
    for (std::size_t i = 0; i < spec.storage.namespaces.size(); ++i) {
        for (const auto& [model, count] : spec.storage.namespaces[i].appliance_mix) {
            require_ref(spec.storage.appliances.count(model) > 0,
                        "storage.namespaces[" + std::to_string(i) + "].appliance_mix", "appliance model", model);
        }
    }
}

json peak_entry_json(const PeakEntry& e) {
    json j;
    j["format"] = std::string(to_string(e.format));
    j["tensor"] = e.tensor;
    j["value"] = e.value ? json(*e.value) : json(nullptr);
    j["sparsity_doubling"] = e.sparsity_doubling;
    return j;
}

json gpu_json(const GpuSpec& g) {
    json j;
    j["model"] = g.model;
    j["sm_count"] = g.sm_count;
    j["max_clock_mhz"] = g.max_clock_mhz;
    j["hbm_gb"] = g.hbm_gb;
    j["hbm_bw_gbs"] = g.hbm_bw_gbs;
    j["tdp_w"] = g.tdp_w;
    j["peaks"] = json::array();
    for (const auto& e : g.peaks.entries) j["peaks"].push_back(peak_entry_json(e));
    return j;
}

json node_json(const NodeSpec& n) {
    json j;
    j["cpu"] = {
        {"model", n.cpu.model},
        {"cores", n.cpu.cores},
        {"clock_ghz", n.cpu.clock_ghz},
        {"flops_per_cycle_per_core", n.cpu.flops_per_cycle_per_core},
        {"mem_channels", n.cpu.mem_channels},
        {"channel_bw_gbs", n.cpu.channel_bw_gbs},
    };
    j["gpus"] = json::array();
    for (const auto& g : n.gpus) j["gpus"].push_back(gpu_json(g));
    j["ram_gb"] = n.ram_gb;
    j["ram_bw_gbs"] = n.ram_bw_gbs;
    j["nic_ports"] = json::array();
    for (const auto& p : n.nic_ports) j["nic_ports"].push_back({{"link_class", p.link_class}, {"count", p.count}});
    j["pcie_per_gpu_gbs"] = n.pcie_per_gpu_gbs;
    j["nvlink_pair_gbs"] = n.nvlink_pair_gbs;
    if (n.dimms) j["dimms"] = {{"count", n.dimms->count}, {"size_gb", n.dimms->size_gb}};
    return j;
}

json count_map_json(const std::map<std::string, std::uint32_t>& m) {
    json j = json::object();
    for (const auto& [k, v] : m) j[k] = v;
    return j;
}

json storage_json(const StorageSpec& s) {
    json j;
    j["appliances"] = json::object();
    for (const auto& [model, a] : s.appliances) {
        json aj;
        aj["count"] = a.count;
        aj["drives"] = {{"count", a.drives.count},
                        {"size_tb", a.drives.size_tb},
                        {"kind", std::string(to_string(a.drives.kind))}};
        aj["hdr_ports"] = a.hdr_ports;
        aj["hdr100_ports"] = a.hdr100_ports;
        if (a.declared_module_tb) aj["declared_module_tb"] = *a.declared_module_tb;
        j["appliances"][model] = std::move(aj);
    }
    j["tiers"] = json::object();
    for (const auto& [name, t] : s.tiers) {
        json tj;
        tj["appliances"] = count_map_json(t.appliances);
        if (t.declared_raw_pb) tj["declared_raw_pb"] = *t.declared_raw_pb;
        j["tiers"][name] = std::move(tj);
    }
    j["namespaces"] = json::array();
    for (const auto& n : s.namespaces) {
        j["namespaces"].push_back({{"path", n.path},
                                   {"appliance_mix", count_map_json(n.appliance_mix)},
                                   {"declared_net_size_pib", n.declared_net_size_pib},
                                   {"declared_bandwidth_gbs", n.declared_bandwidth_gbs}});
    }
    return j;
}

}  // namespace

MachineSpec parse_spec(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw Error(Errc::syntax, "syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
    }

    ObjectReader r(doc, "");
    MachineSpec spec;
    spec.name = r.text("name");

    const auto& cells = as_array(r.at("cells"), "cells");
    if (cells.empty()) throw Error(Errc::non_positive, "cells: at least one cell is required");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        spec.cells.push_back(parse_cell(cells[i], index_path("cells", i)));
    }
    for (const auto& item : as_object(r.at("node_types"), "node_types").items()) {
        spec.node_types[item.key()] = parse_node(item.value(), join("node_types", item.key()));
    }
    for (const auto& item : as_object(r.at("switch_types"), "switch_types").items()) {
        spec.switch_types[item.key()] = parse_switch(item.value(), join("switch_types", item.key()));
    }
    for (const auto& item : as_object(r.at("link_classes"), "link_classes").items()) {
        spec.link_classes[item.key()] = parse_link_class(item.value(), join("link_classes", item.key()));
    }
    spec.fabric = parse_fabric(r.at("fabric"), "fabric");
    spec.storage = parse_storage(r.at("storage"), "storage");
    spec.power = parse_power(r.at("power"), "power");
    spec.gateways = r.count_or_zero("gateways");

    if (const auto* catalog = r.maybe("gpu_catalog")) {
        for (const auto& item : as_object(*catalog, "gpu_catalog").items()) {
            spec.gpu_catalog[item.key()] = parse_gpu(item.value(), join("gpu_catalog", item.key()));
        }
    }
    if (const auto* reference = r.maybe("reference")) {
        for (const auto& item : as_object(*reference, "reference").items()) {
            spec.reference[item.key()] = ObjectReader::as_number(item.value(), join("reference", item.key()));
        }
    }
    if (const auto* notes = r.maybe("notes")) {
        const auto& arr = as_array(*notes, "notes");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            ObjectReader nr(arr[i], index_path("notes", i));
            Note n;
            n.field = nr.text("field");
            n.text = nr.text("text");
            nr.finish();
            spec.notes.push_back(std::move(n));
        }
    }
    r.finish();

    resolve_references(spec);
    return spec;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io, "cannot read '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

MachineSpec load_spec(const std::filesystem::path& path) { return parse_spec(read_text_file(path)); }

std::string serialize_spec(const MachineSpec& spec) {
    json j;
    j["name"] = spec.name;
    j["cells"] = json::array();
    for (const auto& c : spec.cells) {
        json cj;
        cj["id"] = c.id;
        cj["kind"] = std::string(to_string(c.kind));
        cj["rack_groups"] = json::array();
        for (const auto& g : c.rack_groups) {
            cj["rack_groups"].push_back({{"racks", g.racks},
                                         {"blades_per_rack", g.blades_per_rack},
                                         {"nodes_per_blade", g.nodes_per_blade},
                                         {"node_type", g.node_type}});
        }
        cj["spines"] = c.spines;
        cj["leafs"] = c.leafs;
        j["cells"].push_back(std::move(cj));
    }
    j["node_types"] = json::object();
    for (const auto& [name, n] : spec.node_types) j["node_types"][name] = node_json(n);
    j["switch_types"] = json::object();
    for (const auto& [name, s] : spec.switch_types) {
        j["switch_types"][name] = {{"model", s.model},
                                   {"radix_200g_ports", s.radix_200g_ports},
                                   {"port_to_port_ns", s.port_to_port_ns},
                                   {"split_mode_supported", s.split_mode_supported}};
    }
    j["link_classes"] = json::object();
    for (const auto& [name, l] : spec.link_classes) {
        j["link_classes"][name] = {{"name", l.name},
                                   {"rate_gbps", l.rate_gbps},
                                   {"endpoint_latency_ns", l.endpoint_latency_ns},
                                   {"length_m", l.length_m}};
    }
    const auto& f = spec.fabric;
    j["fabric"] = {{"switch_type", f.switch_type},
                   {"leaf_spine_link_class", f.leaf_spine_link_class},
                   {"global_link_class", f.global_link_class},
                   {"gateway_link_class", f.gateway_link_class},
                   {"storage_hdr_link_class", f.storage_hdr_link_class},
                   {"storage_hdr100_link_class", f.storage_hdr100_link_class},
                   {"spine_uplinks", f.spine_uplinks},
                   {"spine_downlinks", f.spine_downlinks},
                   {"gateway_ports", f.gateway_ports}};
    j["storage"] = storage_json(spec.storage);
    j["power"] = {{"pue", spec.power.pue},
                  {"dlc_capacity_mw", spec.power.dlc_capacity_mw},
                  {"it_load_mw", spec.power.it_load_mw}};
    j["gateways"] = spec.gateways;
    j["gpu_catalog"] = json::object();
    for (const auto& [name, g] : spec.gpu_catalog) j["gpu_catalog"][name] = gpu_json(g);
    j["reference"] = json::object();
    for (const auto& [key, value] : spec.reference) j["reference"][key] = value;
    j["notes"] = json::array();
    for (const auto& n : spec.notes) j["notes"].push_back({{"field", n.field}, {"text", n.text}});
    return j.dump(2) + "\n";
}

}  // namespace fabtwin
