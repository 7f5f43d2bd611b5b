#pragma once

#include "threatcluster/clustering.hpp"
#include "threatcluster/config.hpp"
#include "threatcluster/corpus.hpp"
#include "threatcluster/dbscan.hpp"
#include "threatcluster/dense_io.hpp"
#include "threatcluster/distance.hpp"
#include "threatcluster/embedding.hpp"
#include "threatcluster/error.hpp"
#include "threatcluster/harness.hpp"
#include "threatcluster/kmeans.hpp"
#include "threatcluster/metrics.hpp"
#include "threatcluster/optics.hpp"
#include "threatcluster/parallel.hpp"
#include "threatcluster/preprocess.hpp"
#include "threatcluster/report.hpp"
#include "threatcluster/sparse_io.hpp"
#include "threatcluster/stemmer.hpp"
#include "threatcluster/stopwords.hpp"
#include "threatcluster/tfidf.hpp"
