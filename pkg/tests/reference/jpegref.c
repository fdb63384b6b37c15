/* Test-only reference helper built on the system libjpeg.
 *
 * Subcommands:
 *   dump in.jpg out.bin
 *     Binary dump: u32 ncomp, then per component u32 height_in_blocks,
 *     u32 width_in_blocks, u32 h_samp, u32 v_samp, 64 x u16 quant values
 *     (as stored by the library), then blocks row-major with 64 x i16 raw
 *     (quantized) coefficients each, in the library's in-memory order.
 *     All integers little-endian (x86 assumed).
 *   encode in.ppm out.jpg quality subsamp restart_mcus
 *     P6 -> baseline JPEG; subsamp 444 or 420; restart_mcus 0 disables DRI.
 */
#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <setjmp.h>
#include <jpeglib.h>

struct err_mgr {
    struct jpeg_error_mgr pub;
    jmp_buf jb;
};

static void err_exit(j_common_ptr cinfo)
{
    struct err_mgr *e = (struct err_mgr *)cinfo->err;
    (*cinfo->err->output_message)(cinfo);
    longjmp(e->jb, 1);
}

static int do_dump(const char *inpath, const char *outpath)
{
    FILE *fin = fopen(inpath, "rb");
    if (!fin) { perror("open input"); return 1; }
    FILE *fout = fopen(outpath, "wb");
    if (!fout) { perror("open output"); fclose(fin); return 1; }

    struct jpeg_decompress_struct dinfo;
    struct err_mgr jerr;
    dinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = err_exit;
    if (setjmp(jerr.jb)) {
        jpeg_destroy_decompress(&dinfo);
        fclose(fin); fclose(fout);
        return 2;
    }
    jpeg_create_decompress(&dinfo);
    jpeg_stdio_src(&dinfo, fin);
    jpeg_read_header(&dinfo, TRUE);
    jvirt_barray_ptr *coefs = jpeg_read_coefficients(&dinfo);

    unsigned int ncomp = dinfo.num_components;
    fwrite(&ncomp, 4, 1, fout);
    for (int ci = 0; ci < dinfo.num_components; ci++) {
        jpeg_component_info *comp = &dinfo.comp_info[ci];
        unsigned int hb = comp->height_in_blocks;
        unsigned int wb = comp->width_in_blocks;
        unsigned int hs = comp->h_samp_factor;
        unsigned int vs = comp->v_samp_factor;
        fwrite(&hb, 4, 1, fout);
        fwrite(&wb, 4, 1, fout);
        fwrite(&hs, 4, 1, fout);
        fwrite(&vs, 4, 1, fout);
        JQUANT_TBL *qt = dinfo.quant_tbl_ptrs[comp->quant_tbl_no];
        if (!qt) { fprintf(stderr, "missing quant table\n"); return 2; }
        fwrite(qt->quantval, 2, DCTSIZE2, fout);
        for (JDIMENSION row = 0; row < hb; row++) {
            JBLOCKARRAY rows = (*dinfo.mem->access_virt_barray)(
                (j_common_ptr)&dinfo, coefs[ci], row, 1, FALSE);
            fwrite(rows[0], sizeof(JCOEF), (size_t)wb * DCTSIZE2, fout);
        }
    }
    jpeg_finish_decompress(&dinfo);
    jpeg_destroy_decompress(&dinfo);
    fclose(fin);
    fclose(fout);
    return 0;
}

static int read_ppm(FILE *f, int *w, int *h, unsigned char **pixels)
{
    int maxval;
    if (fscanf(f, "P6 %d %d %d", w, h, &maxval) != 3 || maxval != 255)
        return 1;
    fgetc(f); /* single whitespace after header */
    size_t n = (size_t)*w * *h * 3;
    *pixels = malloc(n);
    if (fread(*pixels, 1, n, f) != n) return 1;
    return 0;
}

static int do_encode(const char *inpath, const char *outpath, int quality,
                     const char *subsamp, int restart)
{
    FILE *fin = fopen(inpath, "rb");
    if (!fin) { perror("open input"); return 1; }
    int w, h;
    unsigned char *pixels;
    if (read_ppm(fin, &w, &h, &pixels)) { fprintf(stderr, "bad ppm\n"); return 1; }
    fclose(fin);
    FILE *fout = fopen(outpath, "wb");
    if (!fout) { perror("open output"); return 1; }

    struct jpeg_compress_struct cinfo;
    struct err_mgr jerr;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = err_exit;
    if (setjmp(jerr.jb)) {
        jpeg_destroy_compress(&cinfo);
        fclose(fout);
        return 2;
    }
    jpeg_create_compress(&cinfo);
    jpeg_stdio_dest(&cinfo, fout);
    cinfo.image_width = w;
    cinfo.image_height = h;
    cinfo.input_components = 3;
    cinfo.in_color_space = JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    if (strcmp(subsamp, "444") == 0) {
        cinfo.comp_info[0].h_samp_factor = 1;
        cinfo.comp_info[0].v_samp_factor = 1;
    } else {
        cinfo.comp_info[0].h_samp_factor = 2;
        cinfo.comp_info[0].v_samp_factor = 2;
    }
    cinfo.comp_info[1].h_samp_factor = 1;
    cinfo.comp_info[1].v_samp_factor = 1;
    cinfo.comp_info[2].h_samp_factor = 1;
    cinfo.comp_info[2].v_samp_factor = 1;
    cinfo.restart_interval = restart;
    cinfo.optimize_coding = FALSE;
    jpeg_start_compress(&cinfo, TRUE);
    while (cinfo.next_scanline < cinfo.image_height) {
        JSAMPROW row = pixels + (size_t)cinfo.next_scanline * w * 3;
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
    fclose(fout);
    free(pixels);
    return 0;
}

int main(int argc, char **argv)
{
    if (argc >= 4 && strcmp(argv[1], "dump") == 0)
        return do_dump(argv[2], argv[3]);
    if (argc >= 7 && strcmp(argv[1], "encode") == 0)
        return do_encode(argv[2], argv[3], atoi(argv[4]), argv[5], atoi(argv[6]));
    fprintf(stderr, "usage: jpegref dump in.jpg out.bin\n"
                    "       jpegref encode in.ppm out.jpg quality 444|420 restart\n");
    return 1;
}
