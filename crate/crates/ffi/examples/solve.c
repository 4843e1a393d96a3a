/* Solves i*X*j = k through the C interface.
 *
 *   cargo build -p quatrank-ffi --release
 *   cc examples/solve.c -Iinclude ../../target/release/libquatrank_ffi.a -lm -lpthread -ldl -o solve
 */
#include <stdio.h>
#include "quatrank.h"

static QrMatrix *scalar(const char *literal) {
    QrMatrix *m = NULL;
    qr_matrix_new(1, 1, &m);
    qr_matrix_set(m, 0, 0, literal);
    return m;
}

int main(void) {
    QrMatrix *a = scalar("k"), *b = scalar("i"), *c = scalar("0"), *d = scalar("j"), *e = scalar("0");
    QrMatrix *x = NULL, *y = NULL;
    int code = 0;
    if (qr_solve(a, b, c, d, e, QR_SOLVE_MODE_PARTICULAR, &x, &y) != QR_STATUS_OK) {
        fprintf(stderr, "error: %s\n", qr_last_error());
        code = 1;
    } else {
        char *entry = NULL;
        qr_matrix_get(x, 0, 0, &entry);
        printf("X = %s\n", entry);
        qr_string_free(entry);
    }
    QrMatrix *all[] = {a, b, c, d, e, x, y};
    for (size_t k = 0; k < sizeof all / sizeof all[0]; k++) qr_matrix_free(all[k]);
    return code;
}
