#include <stdio.h>
#include <string.h>
#include "meta_unsup.h"

#define CHECK(call)                                                         \
    do {                                                                    \
        MuStatus s_ = (call);                                               \
        if (s_ != MU_STATUS_OK) {                                           \
            const char *m_ = mu_last_error_message();                       \
            fprintf(stderr, "%s failed: %d %s\n", #call, s_, m_ ? m_ : ""); \
            return 1;                                                       \
        }                                                                   \
    } while (0)

int main(void) {
    size_t y[4] = {0, 0, 1, 1};
    size_t z[4] = {0, 1, 0, 1};
    double loss = -1.0, ari = -1.0;
    CHECK(mu_clustering_loss(y, z, 4, &loss));
    CHECK(mu_adjusted_rand_index(y, z, 4, &ari));

    double pts[12] = {0.0, 0.0, 0.1, 0.0, 0.0, 0.1, 9.0, 9.0, 9.1, 9.0, 9.0, 9.1};
    MuDataset *ds = NULL;
    CHECK(mu_dataset_new(pts, 6, 2, NULL, &ds));
    size_t assign[6];
    CHECK(mu_cluster(ds, MU_CLUSTERER_AGGLO_AVERAGE, 2, false, 0, assign, 6));
    double sil = 0.0;
    CHECK(mu_silhouette(ds, assign, &sil));
    mu_dataset_free(ds);

    MuThresholdTrainer *t = mu_threshold_trainer_new();
    size_t us[2] = {0, 1}, vs[2] = {1, 2}, truth[3] = {0, 0, 1};
    double ws[2] = {1.0, 5.0};
    CHECK(mu_threshold_trainer_add_graph(t, 3, us, vs, ws, 2, truth));
    double r_star = 0.0, min_loss = 1.0;
    CHECK(mu_threshold_trainer_fit(t, &r_star, &min_loss));
    mu_threshold_trainer_free(t);

    MuStatus bad = mu_clustering_loss(NULL, z, 4, &loss);
    if (bad != MU_STATUS_NULL_POINTER || mu_last_error_message() == NULL) {
        return 2;
    }

    printf("loss=%.6f ari=%.6f split=%d sil=%.3f r=%.3f min=%.3f v=%s\n", loss, ari,
           assign[0] == assign[2] && assign[0] != assign[3], sil, r_star, min_loss, mu_version());
    return 0;
}
