#include <string>

#include "json.hpp"
#include "stegarmor/errors.hpp"
#include "stegarmor/robust_embedder.hpp"

namespace stegarmor {

using nlohmann::json;

namespace {

json recipe_json(const StegoRecipe& r) {
  json j;
  j["e_n"] = r.e_n;
  j["t"] = r.t;
  j["n_m"] = r.n_m;
  j["h"] = r.h;
  j["stc_seed"] = r.stc_seed;
  j["cover_qf"] = r.cover_qf ? json(*r.cover_qf) : json(nullptr);
  j["crc_mode"] = r.crc;
  // Non-IJG covers cannot be described by a quality factor alone.
  if (!r.cover_qf || ijg_quant_table(*r.cover_qf) != r.cover_table) {
    j["cover_table"] = r.cover_table.steps();
  }
  return j;
}

}  // namespace

std::string recipe_to_json(const StegoRecipe& r) { return recipe_json(r).dump(2) + "\n"; }

StegoRecipe recipe_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("recipe is not valid JSON: ") + e.what());
  }
  try {
    StegoRecipe r;
    r.e_n = j.at("e_n").get<int>();
    r.t = j.at("t").get<int>();
    r.n_m = j.at("n_m").get<std::size_t>();
    r.h = j.at("h").get<int>();
    r.stc_seed = j.at("stc_seed").get<std::uint64_t>();
    if (!j.at("cover_qf").is_null()) r.cover_qf = j.at("cover_qf").get<int>();
    r.crc = j.value("crc_mode", false);
    if (j.contains("cover_table")) {
      r.cover_table = QuantTable(j.at("cover_table").get<std::array<int, kBlockArea>>());
    } else if (r.cover_qf) {
      r.cover_table = ijg_quant_table(*r.cover_qf);
    } else {
      throw InvalidArgument("recipe needs cover_qf or cover_table");
    }
    if (r.e_n < 1 || r.e_n > 6) throw InvalidDomainIndex("recipe e_n out of range");
    if (r.t < 1 || r.t > 12) throw InvalidCapability("recipe t out of range");
    return r;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed recipe: ") + e.what());
  }
}

std::string report_to_json(const RobustnessReport& report) {
  json j;
  j["exhausted"] = report.exhausted;
  j["final_r_e"] = report.final_r_e;
  j["channel_quality"] = report.channel_quality == 0 ? json(nullptr) : json(report.channel_quality);
  j["final"] = recipe_json(report.final);
  j["attempts"] = json::array();
  for (const auto& a : report.attempts) {
    j["attempts"].push_back(
        {{"e_n", a.e_n}, {"t", a.t}, {"r_e", a.r_e}, {"fits", a.fits}, {"changes", a.changes}});
  }
  return j.dump(2) + "\n";
}

}  // namespace stegarmor
