#pragma once

#include <fanbranch/io.hpp>

#include <string>

inline std::shared_ptr<const fanbranch::Fan> fixture_fan(const std::string& name) {
  return fanbranch::io::load_fan(std::string(FANBRANCH_DATA_DIR) + "/" + name + ".fan.json");
}

inline fanbranch::io::Bundle fixture_bundle(const std::string& name) {
  return fanbranch::io::load_bundle(std::string(FANBRANCH_DATA_DIR) + "/" + name + ".bundle.json");
}
