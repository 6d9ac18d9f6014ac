#pragma once

#include <stdexcept>
#include <string>

namespace pokerl {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  using Error::Error;
};

struct ValidationError : Error {
  using Error::Error;
};

struct UnknownSequence : Error {
  explicit UnknownSequence(int id) : Error("unknown sequence " + std::to_string(id)) {}
};

struct NotInBattle : Error {
  NotInBattle() : Error("battle_step called outside a battle") {}
};

struct ConfigError : Error {
  using Error::Error;
};

struct SteppedTerminalEpisode : Error {
  SteppedTerminalEpisode() : Error("step called on a finished episode; call reset first") {}
};

struct EmptyCounts : Error {
  EmptyCounts() : Error("action counts are all zero") {}
};

struct SequenceMismatch : Error {
  SequenceMismatch(int table, int requested)
      : Error("q-table was trained on sequence " + std::to_string(table) +
              ", evaluation requested sequence " + std::to_string(requested)) {}
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace pokerl
