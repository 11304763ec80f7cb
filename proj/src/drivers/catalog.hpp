#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "core/driver.hpp"

namespace vdf {

struct CatalogEntry {
    DriverInfo info;
    std::function<std::unique_ptr<ModelDriver>()> make;
};

// All registered model drivers: one per seeded bug archetype, a hardened
// variant of each, and the fixture drivers (coverage gate, interrupt-gated
// init, delay-heavy, plain echo). Names are stable; the CLI selects by name.
const std::vector<CatalogEntry>& driver_catalog();
const CatalogEntry* find_driver(const std::string& name);

namespace detail {
void register_archetypes(std::vector<CatalogEntry>& out);
void register_fixtures(std::vector<CatalogEntry>& out);
}  // namespace detail

}  // namespace vdf
