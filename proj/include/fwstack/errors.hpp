#pragma once

#include <stdexcept>
#include <string>

namespace fwstack {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// series
struct InvalidSeries : Error { using Error::Error; };
struct NonPositiveInput : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct TooShort : Error { using Error::Error; };
struct WindowTooLarge : Error { using Error::Error; };
struct SeriesTooShort : Error { using Error::Error; };

// meta-features
struct ZeroMean : Error { using Error::Error; };
struct TooShortForEmbedding : Error { using Error::Error; };
struct DegenerateRegression : Error { using Error::Error; };

// metrics
struct LengthMismatch : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };

// forecasters / ensemble
struct NoViableModel : Error { using Error::Error; };
struct InconsistentWidth : Error { using Error::Error; };

// ingestion / synth / cli
struct UnreadableFile : Error { using Error::Error; };
struct HeaderMismatch : Error { using Error::Error; };
struct UnknownRegion : Error { using Error::Error; };
struct InvalidSpec : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct IncompleteRun : Error { using Error::Error; };
struct PipelineFailure : Error { using Error::Error; };

} // namespace fwstack
