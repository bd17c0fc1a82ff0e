#pragma once

#include <stdexcept>
#include <string>

namespace rga {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define RGA_DEFINE_ERROR(Name)                                        \
    struct Name : Error {                                             \
        explicit Name(const std::string& msg) : Error(#Name ": " + msg) {} \
    }

RGA_DEFINE_ERROR(ZeroRoot);
RGA_DEFINE_ERROR(NormViolation);
RGA_DEFINE_ERROR(ParallelViolation);
RGA_DEFINE_ERROR(ClosureViolation);
RGA_DEFINE_ERROR(OrderCapExceeded);
RGA_DEFINE_ERROR(IncompatibleGroup);
RGA_DEFINE_ERROR(GridMismatch);
RGA_DEFINE_ERROR(ScaleOutOfRange);
RGA_DEFINE_ERROR(DegenerateNormalizer);
RGA_DEFINE_ERROR(RangeTooNarrow);
RGA_DEFINE_ERROR(NotContractive);
RGA_DEFINE_ERROR(NotInvariant);
RGA_DEFINE_ERROR(LambdaTooSmall);
RGA_DEFINE_ERROR(MissingTildeFamily);
RGA_DEFINE_ERROR(EmptyLibrary);
RGA_DEFINE_ERROR(OriginMissing);
RGA_DEFINE_ERROR(RTooLarge);
RGA_DEFINE_ERROR(EpsTooSmall);
RGA_DEFINE_ERROR(NoConvergence);
RGA_DEFINE_ERROR(ConfigInvalid);
RGA_DEFINE_ERROR(IoFailure);

#undef RGA_DEFINE_ERROR

} // namespace rga
