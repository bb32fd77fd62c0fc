#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tsl/model.hpp"

namespace tsl {

namespace {

using nlohmann::json;

double number(const json& obj, const char* key) {
  if (!obj.contains(key)) throw Error(ErrorCode::ParseError, std::string("missing key '") + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number()) throw Error(ErrorCode::ParseError, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::vector<double> coefficients(const json& obj, const char* key) {
  if (!obj.contains(key)) return {};
  const json& v = obj.at(key);
  if (!v.is_array()) throw Error(ErrorCode::ParseError, std::string("q.") + key + " must be an array");
  std::vector<double> out;
  for (const json& c : v) {
    if (!c.is_number()) throw Error(ErrorCode::ParseError, std::string("q.") + key + " holds a non-number");
    out.push_back(c.get<double>());
  }
  return out;
}

}  // namespace

ProblemSpec parse_problem(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "problem file must hold a JSON object");

  ProblemSpec spec;
  spec.a = number(doc, "a");
  spec.c = number(doc, "c");
  spec.b = number(doc, "b");

  if (!doc.contains("alpha") || !doc.at("alpha").is_object())
    throw Error(ErrorCode::ParseError, "missing object 'alpha'");
  const json& alpha = doc.at("alpha");
  spec.alpha10 = number(alpha, "a10");
  spec.alpha11 = number(alpha, "a11");
  spec.alpha20 = number(alpha, "a20");
  spec.alpha21 = number(alpha, "a21");
  spec.alpha20p = number(alpha, "a20p");
  spec.alpha21p = number(alpha, "a21p");

  if (!doc.contains("beta") || !doc.at("beta").is_array() || doc.at("beta").size() != 2)
    throw Error(ErrorCode::ParseError, "'beta' must be an array of two rows");
  for (std::size_t i = 0; i < 2; ++i) {
    const json& row = doc.at("beta").at(i);
    if (!row.is_array() || row.size() != 4)
      throw Error(ErrorCode::ParseError, "each 'beta' row must hold four numbers");
    for (std::size_t j = 0; j < 4; ++j) {
      if (!row.at(j).is_number()) throw Error(ErrorCode::ParseError, "'beta' holds a non-number");
      spec.beta[i][j] = row.at(j).get<double>();
    }
  }

  if (doc.contains("q")) {
    const json& q = doc.at("q");
    if (!q.is_object()) throw Error(ErrorCode::ParseError, "'q' must be an object");
    spec.q.left = coefficients(q, "left");
    spec.q.right = coefficients(q, "right");
  }
  return spec;
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_problem(buffer.str());
}

std::string to_json(const ProblemSpec& spec) {
  json doc;
  doc["a"] = spec.a;
  doc["c"] = spec.c;
  doc["b"] = spec.b;
  doc["alpha"] = {{"a10", spec.alpha10}, {"a11", spec.alpha11}, {"a20", spec.alpha20},
                  {"a21", spec.alpha21}, {"a20p", spec.alpha20p}, {"a21p", spec.alpha21p}};
  doc["beta"] = json::array({json(spec.beta[0]), json(spec.beta[1])});
  doc["q"] = {{"left", spec.q.left}, {"right", spec.q.right}};
  return doc.dump(2);
}

}  // namespace tsl
