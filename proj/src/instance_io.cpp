#include "fedpex/instance_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fedpex/errors.hpp"

namespace fedpex {
namespace {

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename Derived>
std::string array(const Eigen::DenseBase<Derived>& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += number(v(i));
  }
  return out + "]";
}

Eigen::VectorXd to_vector(const nlohmann::json& arr, const char* field) {
  if (!arr.is_array()) throw ParameterError(std::string("field '") + field + "' must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw ParameterError(std::string("non-numeric entry in ") + field);
    v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  }
  return v;
}

double to_sigma(const nlohmann::json& doc) {
  if (!doc.contains("sigma") || !doc["sigma"].is_number()) {
    throw ParameterError("instance needs a numeric 'sigma'");
  }
  return doc["sigma"].get<double>();
}

}  // namespace

std::string to_json(const MabInstance& inst) {
  return R"({"type":"mab","means":)" + array(inst.means) + R"(,"sigma":)" + number(inst.sigma) +
         "}";
}

std::string to_json(const LinearInstance& inst) {
  std::string ctx = "[";
  for (Eigen::Index k = 0; k < inst.contexts.cols(); ++k) {
    if (k) ctx += ",";
    ctx += array(inst.contexts.col(k));
  }
  ctx += "]";
  return R"({"type":"linear","dim":)" + std::to_string(inst.dim()) + R"(,"contexts":)" + ctx +
         R"(,"theta":)" + array(inst.theta) + R"(,"sigma":)" + number(inst.sigma) + "}";
}

std::string to_json(const AnyInstance& inst) {
  return std::visit([](const auto& i) { return to_json(i); }, inst);
}

AnyInstance parse_instance(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParameterError(std::string("malformed instance JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("type") || !doc["type"].is_string()) {
    throw ParameterError("instance needs a string 'type'");
  }
  const auto type = doc["type"].get<std::string>();
  if (type == "mab") {
    if (!doc.contains("means")) throw ParameterError("MAB instance needs 'means'");
    MabInstance inst;
    inst.means = to_vector(doc["means"], "means");
    inst.sigma = to_sigma(doc);
    inst.validate();
    return inst;
  }
  if (type == "linear") {
    for (const char* f : {"dim", "contexts", "theta"}) {
      if (!doc.contains(f)) throw ParameterError(std::string("linear instance needs '") + f + "'");
    }
    if (!doc["dim"].is_number_integer() || doc["dim"].get<long long>() < 1) {
      throw ParameterError("'dim' must be a positive integer");
    }
    const auto d = static_cast<Eigen::Index>(doc["dim"].get<long long>());
    const auto& ctx = doc["contexts"];
    if (!ctx.is_array()) throw ParameterError("'contexts' must be an array of arrays");
    LinearInstance inst;
    inst.contexts.resize(d, static_cast<Eigen::Index>(ctx.size()));
    for (std::size_t k = 0; k < ctx.size(); ++k) {
      const Eigen::VectorXd x = to_vector(ctx[k], "contexts");
      if (x.size() != d) throw ParameterError("context dimension differs from 'dim'");
      inst.contexts.col(static_cast<Eigen::Index>(k)) = x;
    }
    inst.theta = to_vector(doc["theta"], "theta");
    if (inst.theta.size() != d) throw ParameterError("theta dimension differs from 'dim'");
    inst.sigma = to_sigma(doc);
    inst.validate();
    return inst;
  }
  throw ParameterError("unknown instance type '" + type + "'");
}

AnyInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open instance file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

void save_instance(const std::filesystem::path& path, const AnyInstance& inst) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(inst) << '\n';
}

}  // namespace fedpex
