#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace montage {

using PromptFields = std::map<std::string, std::string, std::less<>>;

/// Prompt text with `{{Name}}` placeholders.
class PromptTemplate {
public:
  PromptTemplate(std::string name, std::string body);

  const std::string& name() const noexcept { return name_; }
  const std::string& body() const noexcept { return body_; }
  /// Placeholder names in order of appearance (repeats included).
  const std::vector<std::string>& placeholders() const noexcept { return names_; }

  /// Substitutes every placeholder in one pass; substituted values are never
  /// re-scanned. Throws Errc::unfilled_placeholder if a placeholder has no
  /// value. Extra fields are ignored.
  std::string render(const PromptFields& fields) const;

  /// Inverse of render for prompts produced by this template: returns the
  /// placeholder values, or nullopt if `rendered` does not fit the template.
  /// Each value extends to the first occurrence of the literal text that
  /// follows it, so values containing that literal are split wrongly.
  std::optional<PromptFields> match(std::string_view rendered) const;

private:
  std::string name_;
  std::string body_;
  std::vector<std::string> literals_;  // names_.size() + 1 segments
  std::vector<std::string> names_;
};

namespace prompts {

// Benchmark construction.
const PromptTemplate& decompose_events();  // {{Paragraph}}
const PromptTemplate& incremental_lie();   // {{CurrentParagraph}}, {{Event}}
const PromptTemplate& rephrase();          // {{Paragraph}}

// Evaluators.
const PromptTemplate& coarse_evaluator();  // {{Source}}, {{Target}}
const PromptTemplate& decomposer();        // {{Paragraph}}
const PromptTemplate& fact_checker();      // {{Source}}, {{Fact}}
const PromptTemplate& sorter();            // {{Paragraph}}, {{Events}}

std::span<const PromptTemplate* const> all();

/// The template `rendered` was produced from, if any, with its fields.
struct Identified {
  const PromptTemplate* prompt;
  PromptFields fields;
};
std::optional<Identified> identify(std::string_view rendered);

/// "- e1\n- e2..." as used for the sorter's event list.
std::string bullet_list(std::span<const std::string> items);

}  // namespace prompts

}  // namespace montage
