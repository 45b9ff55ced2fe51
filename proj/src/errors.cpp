#include "fracsys/errors.hpp"

namespace fracsys {

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::AccuracyLoss: return "accuracy-loss";
    case ErrorKind::UnsupportedOrder: return "unsupported-order";
    case ErrorKind::IllConditioned: return "ill-conditioned-decomposition";
    case ErrorKind::SeriesDivergence: return "series-divergence";
    case ErrorKind::InvalidOrder: return "invalid-order";
    case ErrorKind::IncompatibleGrids: return "incompatible-grids";
    case ErrorKind::InaccurateTransform: return "inaccurate-transform";
    case ErrorKind::Consistency: return "internal-consistency";
    case ErrorKind::TruncationLimit: return "truncation-limit";
    case ErrorKind::RequiresRational: return "requires-rational-orders";
    case ErrorKind::WrongStructure: return "wrong-structure";
    case ErrorKind::InvalidForcing: return "invalid-forcing";
    case ErrorKind::NodeCollision: return "node-collision";
    case ErrorKind::BlowUp: return "blow-up";
    case ErrorKind::SingularSymbol: return "singular-symbol";
    case ErrorKind::Validation: return "validation";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}

}  // namespace fracsys
