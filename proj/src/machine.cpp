#include "tmlab/machine.hpp"

#include <stdexcept>

namespace tmlab {

Machine::Machine(std::size_t num_states) : table_(num_states) {
  if (num_states > kMaxStates) throw std::length_error("too many states");
}

void Machine::set(StateIndex state, Symbol symbol, Transition t) {
  if (state >= table_.size()) throw std::out_of_range("transition row is not a listed state");
  if (symbol > 1 || t.write > 1) throw std::out_of_range("symbol outside {0, 1}");
  if (!t.halts() && t.next >= table_.size()) throw std::out_of_range("next state is not a listed state");
  table_[state][symbol] = t;
}

void Machine::clear(StateIndex state, Symbol symbol) { table_.at(state).at(symbol).reset(); }

std::size_t Machine::defined_count() const {
  std::size_t n = 0;
  for (const auto& row : table_) n += static_cast<std::size_t>(row[0].has_value()) + row[1].has_value();
  return n;
}

StateIndex Machine::add_state() {
  if (table_.size() >= kMaxStates) throw std::length_error("too many states");
  table_.emplace_back();
  return static_cast<StateIndex>(table_.size() - 1);
}

InputWord InputWord::from_string(std::string_view text) {
  InputWord w;
  w.symbols.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') throw std::invalid_argument("input word must be over {0,1}");
    w.symbols.push_back(static_cast<Symbol>(c - '0'));
  }
  return w;
}

std::string InputWord::to_string() const {
  std::string s;
  s.reserve(symbols.size());
  for (Symbol c : symbols) s.push_back(static_cast<char>('0' + c));
  return s;
}

Configuration initial_configuration(const Machine&, const InputWord& w) {
  return Configuration{0, 0, DenseTape(w.symbols)};
}

StepResult step(const Machine& m, const Configuration& c) {
  const Symbol read = c.tape.cell(c.head);
  const auto& t = m.at(c.state, read);
  if (!t) return {StepKind::HaltedByUndefined, c};
  Configuration next = c;
  next.tape.write(c.head, t->write);
  next.head += static_cast<int>(t->move);
  next.state = t->next;
  return {t->halts() ? StepKind::HaltedByZ : StepKind::Next, std::move(next)};
}

char state_letter(StateIndex state) {
  if (state == kHaltState) return 'Z';
  return state < 26 ? static_cast<char>('A' + state) : '?';
}

}  // namespace tmlab
