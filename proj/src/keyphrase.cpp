#include <fstream>
#include <sstream>

#include "json.hpp"

#include "pedrole/classifiers.hpp"
#include "pedrole/error.hpp"
#include "pedrole/textproc.hpp"

namespace pedrole {

KeyphraseRules KeyphraseRules::defaults() {
  KeyphraseRules rules;
  rules.phrases.push_back({Role::Tutorial, {"tutorial"}});
  rules.phrases.push_back({Role::SoftwareManual, {"software manual", "manual", "technical manual"}});
  return rules;
}

KeyphraseRules keyphrase_rules_from_json(std::string_view json) {
  KeyphraseRules rules;
  try {
    const auto j = nlohmann::json::parse(json);
    if (!j.is_object()) throw InputError("keyphrase rules must be a JSON object of role -> phrase array");
    for (const auto& [name, list] : j.items()) {
      const Role role = role_from_string(name);
      std::vector<std::string> phrases;
      for (const auto& p : list) {
        std::string phrase = p.get<std::string>();
        for (char& c : phrase) {
          if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        }
        if (phrase.find_first_not_of(" \t") == std::string::npos) {
          throw InputError("empty keyphrase for role " + name);
        }
        phrases.push_back(std::move(phrase));
      }
      rules.phrases.emplace_back(role, std::move(phrases));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("keyphrase rules: ") + e.what());
  }
  return rules;
}

KeyphraseRules load_keyphrase_rules(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot read keyphrase rules " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return keyphrase_rules_from_json(ss.str());
}

RoleSet keyphrase_predict(const KeyphraseRules& rules, const Document& doc) {
  std::vector<std::string_view> window;
  window.push_back(doc.title);
  for (std::size_t i = 0; i < doc.sentences.size() && i < kKeyphraseBodySentences; ++i) {
    window.push_back(doc.sentences[i]);
  }
  RoleSet out;
  for (const auto& [role, phrases] : rules.phrases) {
    for (const auto& phrase : phrases) {
      for (std::string_view text : window) {
        if (contains_phrase(text, phrase)) {
          out.insert(role);
          break;
        }
      }
      if (out.contains(role)) break;
    }
  }
  return out;
}

}  // namespace pedrole
