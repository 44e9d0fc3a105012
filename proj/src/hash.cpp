#include "boomerang/hash.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace boomerang {

struct Sha256::Impl {
  EVP_MD_CTX* ctx = nullptr;
  Impl() : ctx(EVP_MD_CTX_new()) {
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
      throw std::runtime_error("SHA-256 init failed");
    }
  }
  ~Impl() { EVP_MD_CTX_free(ctx); }
};

Sha256::Sha256() : impl_(std::make_unique<Impl>()) {}

Sha256::Sha256(const Sha256& other) : impl_(std::make_unique<Impl>()) {
  if (EVP_MD_CTX_copy_ex(impl_->ctx, other.impl_->ctx) != 1) {
    throw std::runtime_error("SHA-256 copy failed");
  }
}

Sha256& Sha256::operator=(const Sha256& other) {
  if (this != &other) {
    Sha256 tmp(other);
    impl_ = std::move(tmp.impl_);
  }
  return *this;
}

Sha256::Sha256(Sha256&&) noexcept = default;
Sha256& Sha256::operator=(Sha256&&) noexcept = default;
Sha256::~Sha256() = default;

Sha256& Sha256::update(ByteView data) {
  if (!data.empty() && EVP_DigestUpdate(impl_->ctx, data.data(), data.size()) != 1) {
    throw std::runtime_error("SHA-256 update failed");
  }
  return *this;
}

Sha256& Sha256::update_u32(uint32_t v) {
  const uint8_t b[4] = {static_cast<uint8_t>(v >> 24), static_cast<uint8_t>(v >> 16),
                        static_cast<uint8_t>(v >> 8), static_cast<uint8_t>(v)};
  return update(b);
}

Digest Sha256::digest() const {
  Sha256 copy(*this);
  Digest out{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(copy.impl_->ctx, out.data(), &len) != 1 || len != out.size()) {
    throw std::runtime_error("SHA-256 final failed");
  }
  return out;
}

Digest sha256(ByteView data) { return Sha256().update(data).digest(); }

Bytes expand(const Sha256& prefix, size_t n) {
  Bytes out;
  out.reserve(n + 32);
  for (uint32_t ctr = 0; out.size() < n; ++ctr) {
    Sha256 h(prefix);
    h.update_u32(ctr);
    Digest d = h.digest();
    out.insert(out.end(), d.begin(), d.end());
  }
  out.resize(n);
  return out;
}

}  // namespace boomerang
