#include "core/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "drivers/catalog.hpp"

namespace vdf {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_u64(const std::string& s, u64& out) {
    if (s.empty())
        return false;
    try {
        size_t pos = 0;
        out = std::stoull(s, &pos, 0);  // accepts decimal and 0x
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

bool parse_double(const std::string& s, double& out) {
    try {
        size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

bool parse_bool(const std::string& s, bool& out) {
    if (s == "on" || s == "true" || s == "1") {
        out = true;
        return true;
    }
    if (s == "off" || s == "false" || s == "0") {
        out = false;
        return true;
    }
    return false;
}

bool parse_regions(const std::string& s, std::vector<RegionCfg>& out,
                   std::string& err) {
    out.clear();
    u32 mmio_idx = 0, pio_idx = 0;
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, ',')) {
        item = trim(item);
        size_t colon = item.find(':');
        if (colon == std::string::npos) {
            err = "region must look like mmio:SIZE or pio:SIZE";
            return false;
        }
        std::string kind = trim(item.substr(0, colon));
        u64 size = 0;
        if (!parse_u64(trim(item.substr(colon + 1)), size)) {
            err = "bad region size in '" + item + "'";
            return false;
        }
        RegionCfg r;
        r.size = size;
        if (kind == "mmio") {
            r.kind = RegionKind::Mmio;
            r.index = mmio_idx++;
        } else if (kind == "pio") {
            r.kind = RegionKind::Pio;
            r.index = pio_idx++;
        } else {
            err = "unknown region kind '" + kind + "'";
            return false;
        }
        out.push_back(r);
    }
    if (out.empty()) {
        err = "empty region list";
        return false;
    }
    return true;
}

DeviceConfig& ensure_device(CampaignConfig& cfg) {
    if (!cfg.device_override)
        cfg.device_override.emplace();
    return *cfg.device_override;
}

}  // namespace

bool apply_config_kv(CampaignConfig& cfg, const std::string& section,
                     const std::string& key, const std::string& value,
                     std::string& err) {
    auto bad_value = [&](const char* what) {
        err = "bad value for " + key + ": expected " + what;
        return false;
    };

    if (section.empty()) {
        if (key == "driver") {
            cfg.driver = value;
            return true;
        }
        if (key == "seed")
            return parse_u64(value, cfg.seed) || bad_value("integer");
        if (key == "max_iterations")
            return parse_u64(value, cfg.max_iterations) || bad_value("integer");
        if (key == "budget_seconds")
            return parse_double(value, cfg.budget_seconds) || bad_value("number");
        if (key == "iteration_timeout_seconds")
            return parse_double(value, cfg.iteration_timeout_seconds) ||
                   bad_value("number");
        if (key == "max_input_size")
            return parse_u64(value, cfg.max_input_size) || bad_value("integer");
        if (key == "corpus_dir") {
            cfg.corpus_dir = value;
            return true;
        }
        if (key == "out_dir") {
            cfg.out_dir = value;
            return true;
        }
        if (key == "delay_reduction")
            return parse_bool(value, cfg.delay_reduction) || bad_value("on|off");
        if (key == "stop_on_first_bug")
            return parse_bool(value, cfg.stop_on_first_bug) || bad_value("on|off");
        if (key == "irq") {
            std::istringstream is(value);
            std::string kind;
            is >> kind;
            if (kind == "targeted") {
                cfg.irq.kind = IrqPolicy::Kind::Targeted;
                return true;
            }
            if (kind == "none") {
                cfg.irq.kind = IrqPolicy::Kind::None;
                return true;
            }
            if (kind == "random") {
                u64 lo = 0, hi = 0;
                std::string a, b;
                if (!(is >> a >> b) || !parse_u64(a, lo) || !parse_u64(b, hi))
                    return bad_value("random MIN MAX");
                cfg.irq.kind = IrqPolicy::Kind::Random;
                cfg.irq.min_ns = lo;
                cfg.irq.max_ns = hi;
                return true;
            }
            return bad_value("targeted|none|random MIN MAX");
        }
        err = "unknown key '" + key + "'";
        return false;
    }

    if (section == "engine") {
        if (key == "coverage_guidance")
            return parse_bool(value, cfg.coverage_guidance) || bad_value("on|off");
        if (key == "exec_cost_ns")
            return parse_u64(value, cfg.exec_cost_ns) || bad_value("integer");
        if (key == "stats_interval")
            return parse_u64(value, cfg.stats_interval) || bad_value("integer");
        if (key == "max_entry_size")
            return parse_u64(value, cfg.max_entry_size) || bad_value("integer");
        if (key == "alloc_cap")
            return parse_u64(value, cfg.alloc_cap) || bad_value("integer");
        err = "unknown key '" + key + "' in [engine]";
        return false;
    }

    if (section == "harness") {
        if (key == "kind") {
            if (value == "default") {
                cfg.harness = HarnessKind::Default;
                return true;
            }
            if (value == "extended") {
                cfg.harness = HarnessKind::Extended;
                return true;
            }
            return bad_value("default|extended");
        }
        if (key == "ops") {
            u64 v = 0;
            if (!parse_u64(value, v))
                return bad_value("integer");
            cfg.harness_ops = static_cast<u32>(v);
            return true;
        }
        err = "unknown key '" + key + "' in [harness]";
        return false;
    }

    if (section == "device") {
        DeviceConfig& dev = ensure_device(cfg);
        if (key == "bus") {
            if (value == "pci") dev.bus = BusKind::Pci;
            else if (value == "platform") dev.bus = BusKind::Platform;
            else if (value == "virtio") dev.bus = BusKind::Virtio;
            else return bad_value("pci|platform|virtio");
            return true;
        }
        if (key == "mode") {
            if (value == "passthrough") dev.mode = SimMode::Passthrough;
            else if (value == "emulated") dev.mode = SimMode::Emulated;
            else return bad_value("passthrough|emulated");
            return true;
        }
        if (key == "vendor_id") {
            u64 v;
            if (!parse_u64(value, v) || v > 0xFFFF)
                return bad_value("16-bit id");
            dev.vendor_id = static_cast<u16>(v);
            return true;
        }
        if (key == "device_id") {
            u64 v;
            if (!parse_u64(value, v) || v > 0xFFFF)
                return bad_value("16-bit id");
            dev.device_id = static_cast<u16>(v);
            return true;
        }
        if (key == "name") {
            dev.name = value;
            return true;
        }
        if (key == "virtio_device_id") {
            u64 v;
            if (!parse_u64(value, v) || v > 0xFFFFFFFF)
                return bad_value("32-bit id");
            dev.virtio_device_id = static_cast<u32>(v);
            return true;
        }
        if (key == "feature_bits")
            return parse_u64(value, dev.feature_bits) || bad_value("integer");
        if (key == "irq_lines") {
            u64 v;
            if (!parse_u64(value, v) || v == 0 || v > 32)
                return bad_value("1..32");
            dev.irq_lines = static_cast<u32>(v);
            return true;
        }
        if (key == "adversarial_used_len")
            return parse_bool(value, dev.adversarial_used_len) ||
                   bad_value("on|off");
        if (key == "regions")
            return parse_regions(value, dev.regions, err);
        err = "unknown key '" + key + "' in [device]";
        return false;
    }

    if (section == "bugs") {
        BugArchetype a;
        if (!archetype_from_name(key, a)) {
            err = "unknown bug archetype '" + key + "'";
            return false;
        }
        bool v;
        if (!parse_bool(value, v))
            return bad_value("on|off");
        cfg.toggles[static_cast<size_t>(a)] = v;
        return true;
    }

    err = "unknown section [" + section + "]";
    return false;
}

bool parse_config_text(const std::string& text, CampaignConfig& out,
                       std::vector<std::string>& errors) {
    CampaignConfig cfg;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) +
                             ": expected key = value");
            continue;
        }
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        std::string err;
        if (!apply_config_kv(cfg, section, key, value, err))
            errors.push_back("line " + std::to_string(lineno) + ": " + err);
    }
    if (!errors.empty())
        return false;
    out = cfg;
    return true;
}

bool load_config_file(const std::string& path, CampaignConfig& out,
                      std::vector<std::string>& errors) {
    std::ifstream f(path);
    if (!f) {
        errors.push_back("cannot open config file: " + path);
        return false;
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), out, errors);
}

std::string serialize_config(const CampaignConfig& cfg) {
    std::ostringstream os;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        return std::string(buf);
    };
    os << "driver = " << cfg.driver << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "max_iterations = " << cfg.max_iterations << "\n";
    os << "budget_seconds = " << num(cfg.budget_seconds) << "\n";
    os << "iteration_timeout_seconds = " << num(cfg.iteration_timeout_seconds)
       << "\n";
    os << "max_input_size = " << cfg.max_input_size << "\n";
    os << "corpus_dir = " << cfg.corpus_dir << "\n";
    os << "out_dir = " << cfg.out_dir << "\n";
    os << "irq = ";
    switch (cfg.irq.kind) {
    case IrqPolicy::Kind::Targeted: os << "targeted"; break;
    case IrqPolicy::Kind::None: os << "none"; break;
    case IrqPolicy::Kind::Random:
        os << "random " << cfg.irq.min_ns << " " << cfg.irq.max_ns;
        break;
    }
    os << "\n";
    os << "delay_reduction = " << (cfg.delay_reduction ? "on" : "off") << "\n";
    os << "stop_on_first_bug = " << (cfg.stop_on_first_bug ? "on" : "off")
       << "\n";

    os << "[engine]\n";
    os << "coverage_guidance = " << (cfg.coverage_guidance ? "on" : "off")
       << "\n";
    os << "exec_cost_ns = " << cfg.exec_cost_ns << "\n";
    os << "stats_interval = " << cfg.stats_interval << "\n";
    os << "max_entry_size = " << cfg.max_entry_size << "\n";
    os << "alloc_cap = " << cfg.alloc_cap << "\n";

    os << "[harness]\n";
    os << "kind = "
       << (cfg.harness == HarnessKind::Default ? "default" : "extended")
       << "\n";
    os << "ops = " << cfg.harness_ops << "\n";

    if (cfg.device_override) {
        const DeviceConfig& dev = *cfg.device_override;
        os << "[device]\n";
        os << "bus = "
           << (dev.bus == BusKind::Pci
                   ? "pci"
                   : dev.bus == BusKind::Platform ? "platform" : "virtio")
           << "\n";
        os << "mode = "
           << (dev.mode == SimMode::Passthrough ? "passthrough" : "emulated")
           << "\n";
        os << "vendor_id = " << dev.vendor_id << "\n";
        os << "device_id = " << dev.device_id << "\n";
        if (!dev.name.empty())
            os << "name = " << dev.name << "\n";
        os << "virtio_device_id = " << dev.virtio_device_id << "\n";
        os << "feature_bits = " << dev.feature_bits << "\n";
        os << "irq_lines = " << dev.irq_lines << "\n";
        os << "adversarial_used_len = "
           << (dev.adversarial_used_len ? "on" : "off") << "\n";
        os << "regions = ";
        for (size_t i = 0; i < dev.regions.size(); ++i) {
            if (i)
                os << ",";
            os << (dev.regions[i].kind == RegionKind::Mmio ? "mmio" : "pio")
               << ":" << dev.regions[i].size;
        }
        os << "\n";
    }

    os << "[bugs]\n";
    for (int i = 0; i < kArchetypeCount; ++i)
        os << archetype_name(static_cast<BugArchetype>(i)) << " = "
           << (cfg.toggles[static_cast<size_t>(i)] ? "on" : "off") << "\n";
    return os.str();
}

std::vector<std::string> validate_config(const CampaignConfig& cfg) {
    std::vector<std::string> errs;
    if (cfg.driver.empty())
        errs.push_back("no driver selected");
    else if (!find_driver(cfg.driver))
        errs.push_back("driver '" + cfg.driver + "' is not in the catalog");
    if (cfg.max_input_size == 0)
        errs.push_back("max_input_size must be positive");
    if (cfg.max_entry_size == 0)
        errs.push_back("max_entry_size must be positive");
    if (cfg.budget_seconds <= 0)
        errs.push_back("budget_seconds must be positive");
    if (cfg.iteration_timeout_seconds <= 0)
        errs.push_back("iteration_timeout_seconds must be positive");
    if (cfg.exec_cost_ns == 0)
        errs.push_back("exec_cost_ns must be positive");
    if (cfg.stats_interval == 0)
        errs.push_back("stats_interval must be positive");
    if (cfg.alloc_cap == 0)
        errs.push_back("alloc_cap must be positive");
    if (cfg.irq.kind == IrqPolicy::Kind::Random &&
        (cfg.irq.min_ns < 1 || cfg.irq.min_ns > cfg.irq.max_ns))
        errs.push_back("random irq policy needs 1 <= MIN <= MAX");
    if (cfg.device_override) {
        for (auto& e : cfg.device_override->validate())
            errs.push_back("device: " + e);
    }
    return errs;
}

u64 config_hash(const CampaignConfig& cfg) {
    std::string s = serialize_config(cfg);
    u64 h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace vdf
