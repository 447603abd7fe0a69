#include "gridscale/qa/record.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

#include "gridscale/error.hpp"

namespace gridscale::qa {

std::string_view to_string(Task task) {
  switch (task) {
    case Task::opf: return "opf";
    case Task::fault_detection: return "fault_detection";
    case Task::transient_prediction: return "transient_prediction";
    case Task::renewable_prediction: return "renewable_prediction";
    case Task::state_estimation: return "state_estimation";
  }
  return "?";
}

std::string_view to_string(Split split) { return split == Split::train ? "train" : "test"; }

Task parse_task(std::string_view text) {
  for (Task t : all_tasks) {
    if (to_string(t) == text) return t;
  }
  throw Error("unknown task '" + std::string(text) + "'");
}

Split parse_split(std::string_view text) {
  if (text == "train") return Split::train;
  if (text == "test") return Split::test;
  throw Error("unknown split '" + std::string(text) + "'");
}

std::string QARecord::key() const { return std::string(to_string(task)) + "/" + std::to_string(scenario_id); }

const FloatGroup* QARecord::find_group(std::string_view name) const {
  for (const auto* groups : {&float_groups, &answer_float_groups}) {
    for (const auto& g : *groups) {
      if (g.name == name) return &g;
    }
  }
  return nullptr;
}

namespace {

util::Json groups_to_json(const std::vector<FloatGroup>& groups) {
  auto arr = util::Json::array();
  for (const auto& g : groups) arr.push_back({{"name", g.name}, {"values", g.values}});
  return arr;
}

std::vector<FloatGroup> groups_from_json(const util::Json& j) {
  std::vector<FloatGroup> out;
  for (const auto& g : j) out.push_back({g.at("name").get<std::string>(), g.at("values").get<std::vector<double>>()});
  return out;
}

}  // namespace

util::Json to_json(const QARecord& r) {
  util::Json j;
  j["schema"] = record_schema;
  j["task"] = to_string(r.task);
  j["scenario_id"] = r.scenario_id;
  j["split"] = to_string(r.split);
  j["question_text"] = r.question_text;
  j["answer_text"] = r.answer_text;
  j["scalars"] = r.scalars;
  j["float_groups"] = groups_to_json(r.float_groups);
  j["answer_float_groups"] = groups_to_json(r.answer_float_groups);
  j["norm_constants"] = r.norm_constants;
  return j;
}

QARecord record_from_json(const util::Json& j) {
  try {
    if (j.at("schema").get<std::string>() != record_schema) {
      throw ParseError("record schema must be " + std::string(record_schema), 0, 0);
    }
    QARecord r;
    r.task = parse_task(j.at("task").get<std::string>());
    r.scenario_id = j.at("scenario_id").get<std::uint64_t>();
    r.split = parse_split(j.at("split").get<std::string>());
    r.question_text = j.at("question_text").get<std::string>();
    r.answer_text = j.at("answer_text").get<std::string>();
    r.scalars = j.at("scalars").get<std::map<std::string, std::string>>();
    r.float_groups = groups_from_json(j.at("float_groups"));
    r.answer_float_groups = groups_from_json(j.at("answer_float_groups"));
    r.norm_constants = j.at("norm_constants").get<std::map<std::string, double>>();
    return r;
  } catch (const util::Json::exception& e) {
    throw ParseError(std::string("record: ") + e.what(), 0, 0);
  }
}

std::vector<std::string> slots_of(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = text.find('{', pos)) != std::string_view::npos) {
    auto end = text.find('}', pos);
    if (end == std::string_view::npos) throw ParseError("unterminated slot in template", 1, pos + 1);
    out.emplace_back(text.substr(pos + 1, end - pos - 1));
    pos = end + 1;
  }
  return out;
}

void validate(const QARecord& r) {
  auto count_group = [](const std::vector<FloatGroup>& groups, const std::string& name) {
    return std::count_if(groups.begin(), groups.end(), [&](const FloatGroup& g) { return g.name == name; });
  };
  std::set<std::string> used;
  auto check_text = [&](std::string_view text, const std::vector<FloatGroup>& own, const char* which) {
    for (const auto& slot : slots_of(text)) {
      auto scalar = r.scalars.count(slot);
      auto own_groups = count_group(own, slot);
      auto other = count_group(r.float_groups, slot) + count_group(r.answer_float_groups, slot) - own_groups;
      if (scalar + own_groups != 1 || other != 0) {
        throw InvariantError("slot resolves to exactly one value",
                             std::string(which) + " slot {" + slot + "} in " + r.key());
      }
      if (own_groups) {
        if (!used.insert(slot).second) {
          throw InvariantError("float group used once", "{" + slot + "} repeated in " + r.key());
        }
      }
    }
  };
  check_text(r.question_text, r.float_groups, "question");
  check_text(r.answer_text, r.answer_float_groups, "answer");
  for (const auto* groups : {&r.float_groups, &r.answer_float_groups}) {
    for (const auto& g : *groups) {
      if (!used.count(g.name)) throw InvariantError("every group has a slot", g.name + " in " + r.key());
      if (!r.norm_constants.count(g.name)) throw InvariantError("norm constants cover every group", g.name);
    }
  }
}

std::string render(std::string_view text, const QARecord& record) {
  std::string out;
  std::size_t pos = 0;
  for (;;) {
    auto open = text.find('{', pos);
    if (open == std::string_view::npos) break;
    auto close = text.find('}', open);
    out.append(text.substr(pos, open - pos));
    std::string slot(text.substr(open + 1, close - open - 1));
    if (auto it = record.scalars.find(slot); it != record.scalars.end()) {
      out += it->second;
    } else if (const auto* g = record.find_group(slot)) {
      out += '[';
      for (std::size_t i = 0; i < g->values.size(); ++i) {
        if (i) out += ", ";
        out += util::format_double(g->values[i]);
      }
      out += ']';
    } else {
      out += "{" + slot + "}";
    }
    pos = close + 1;
  }
  out.append(text.substr(pos));
  return out;
}

namespace {

std::vector<double> parse_group(std::string_view body, std::size_t offset) {
  std::vector<double> out;
  if (body.size() < 2 || body.front() != '[' || body.back() != ']') {
    throw ParseError("float group must be bracketed", 1, offset + 1);
  }
  body = body.substr(1, body.size() - 2);
  std::size_t pos = 0;
  while (pos < body.size()) {
    auto end = body.find(", ", pos);
    if (end == std::string_view::npos) end = body.size();
    std::string item(body.substr(pos, end - pos));
    char* stop = nullptr;
    double v = std::strtod(item.c_str(), &stop);
    if (item.empty() || stop != item.c_str() + item.size()) {
      throw ParseError("bad number '" + item + "'", 1, offset + pos + 2);
    }
    out.push_back(v);
    pos = end + 2;
  }
  return out;
}

}  // namespace

RenderedValues parse_rendered(std::string_view rendered, std::string_view text) {
  RenderedValues out;
  std::size_t t = 0, r = 0;
  for (;;) {
    auto open = text.find('{', t);
    auto literal = text.substr(t, open == std::string_view::npos ? std::string_view::npos : open - t);
    if (rendered.substr(r, literal.size()) != literal) throw ParseError("text does not match the template", 1, r + 1);
    r += literal.size();
    if (open == std::string_view::npos) break;
    auto close = text.find('}', open);
    std::string slot(text.substr(open + 1, close - open - 1));
    t = close + 1;
    auto next_open = text.find('{', t);
    auto next_literal = text.substr(t, next_open == std::string_view::npos ? std::string_view::npos : next_open - t);
    std::size_t end;
    if (rendered[r] == '[') {
      end = rendered.find(']', r);
      if (end == std::string_view::npos) throw ParseError("unterminated float group", 1, r + 1);
      ++end;
    } else if (next_literal.empty()) {
      end = next_open == std::string_view::npos ? rendered.size() : r;
    } else {
      end = rendered.find(next_literal, r);
      if (end == std::string_view::npos) throw ParseError("text does not match the template", 1, r + 1);
    }
    auto value = rendered.substr(r, end - r);
    if (!value.empty() && value.front() == '[') {
      out.groups[slot] = parse_group(value, r);
    } else {
      out.scalars[slot] = std::string(value);
    }
    r = end;
  }
  if (r != rendered.size()) throw ParseError("trailing text after the template", 1, r + 1);
  return out;
}

}  // namespace gridscale::qa
