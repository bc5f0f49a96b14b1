#pragma once

#include <string>
#include <string_view>

namespace sarf::detail {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string target;  // path + query, at least "/"
};

// Throws DataError when `url` has no http(s) scheme.
SplitUrl split_url(std::string_view url);

std::string url_encode(std::string_view s);

}  // namespace sarf::detail
