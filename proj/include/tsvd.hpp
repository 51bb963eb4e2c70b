#ifndef TSVD_HPP
#define TSVD_HPP

#include <tsvd/completion.hpp>
#include <tsvd/compression.hpp>
#include <tsvd/errors.hpp>
#include <tsvd/io.hpp>
#include <tsvd/synthetic.hpp>
#include <tsvd/tensor.hpp>
#include <tsvd/tproduct.hpp>
#include <tsvd/transform.hpp>
#include <tsvd/tsvd.hpp>

#endif // TSVD_HPP
