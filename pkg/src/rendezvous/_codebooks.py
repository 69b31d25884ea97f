"""Searched codebooks for short IDs.

Entry i is the binary tail of the codeword for ID i; the leading trit is
always 2.  Every book passes exhaustive pairwise validation.
"""

CODEBOOK_11 = (
    0b0101000111, 0b1010010011, 0b1010010110, 0b1010101001,
    0b1010110001, 0b1010111000, 0b1100000111, 0b1100010011,
    0b1100010110, 0b1100100011, 0b1100100101, 0b1100110010,
    0b1100110100, 0b1101000101, 0b1110000110, 0b1110100001,
)

CODEBOOK_16 = (
    0x05ea, 0x083f, 0x092f, 0x096e, 0x098f, 0x09e9, 0x0b35, 0x0d2b,
    0x0d8b, 0x116e, 0x123d, 0x133c, 0x1437, 0x14b6, 0x1536, 0x156a,
    0x1639, 0x1738, 0x1837, 0x184f, 0x1a99, 0x1b31, 0x1b91, 0x1b98,
    0x1d2a, 0x1d32, 0x1f21, 0x20ed, 0x215b, 0x21cb, 0x21ec, 0x22d3,
    0x234e, 0x249b, 0x24ad, 0x24da, 0x24f8, 0x256a, 0x25ac, 0x25e8,
    0x260f, 0x270e, 0x2725, 0x289b, 0x289e, 0x28ab, 0x28cb, 0x28cd,
    0x28ce, 0x28da, 0x291b, 0x298b, 0x298e, 0x299a, 0x29aa, 0x29ca,
    0x2a0f, 0x2a4b, 0x2a4e, 0x2a5a, 0x2a5c, 0x2a8e, 0x2ad8, 0x2b0e,
    0x2b19, 0x2b4a, 0x2c1e, 0x2c2e, 0x2c4b, 0x2c4e, 0x2c5a, 0x2c6a,
    0x2c8b, 0x2c8d, 0x2c8e, 0x2c99, 0x2c9a, 0x2cc9, 0x2cca, 0x2ccc,
    0x2cd8, 0x2d8c, 0x2e0b, 0x2e0d, 0x2e0e, 0x2e1a, 0x2e49, 0x2e4a,
    0x2e4c, 0x2e58, 0x2e8a, 0x2ed0, 0x2f0a, 0x2f0c, 0x3073, 0x30cb,
    0x314b, 0x314e, 0x318e, 0x324e, 0x3472, 0x384b, 0x384e, 0x3872,
    0x388b, 0x388e, 0x389a, 0x38ca, 0x38cc, 0x38e4, 0x390b, 0x3946,
    0x398a, 0x398c, 0x3a0e, 0x3a19, 0x3a4a, 0x3a4c, 0x3a52, 0x3a58,
    0x3b09, 0x3b18, 0x3c0e, 0x3c4a, 0x3c8a, 0x3cc4, 0x3e44, 0x3e48,
    0x3e50, 0x403f, 0x406f, 0x40af, 0x40cf, 0x40ed, 0x416b, 0x443b,
    0x456a, 0x45ca, 0x45e8, 0x486b, 0x48cb, 0x496a, 0x49a9, 0x49ca,
    0x4a5c, 0x4b43, 0x4c2b, 0x4d1a, 0x4e58, 0x4e64, 0x4ec4, 0x4ed0,
    0x5951, 0x5a4c, 0x5a58, 0x5ac4, 0x5e48, 0x602f, 0x604f, 0x605b,
    0x606b, 0x60ad, 0x611b, 0x616a, 0x618b, 0x619a, 0x61c3, 0x6343,
    0x641b, 0x64a9, 0x654a, 0x65a8, 0x660b, 0x661a, 0x681e, 0x682e,
    0x684e, 0x685a, 0x686a, 0x688b, 0x688e, 0x689a, 0x68c3, 0x68ca,
    0x68cc, 0x68d8, 0x68f0, 0x690e, 0x691a, 0x698a, 0x698c, 0x69c2,
    0x6a0b, 0x6a0e, 0x6a1a, 0x6a1c, 0x6a43, 0x6a4a, 0x6a4c, 0x6a54,
    0x6a58, 0x6ad0, 0x6b0a, 0x6b0c, 0x6b42, 0x6b44, 0x6c0e, 0x6c13,
    0x6c1a, 0x6c4a, 0x6c8a, 0x6c8c, 0x6c94, 0x6c98, 0x6cb0, 0x6cc8,
    0x6cd0, 0x6d88, 0x6e0a, 0x6e0c, 0x6e14, 0x6e18, 0x6e41, 0x6e48,
    0x6e50, 0x7036, 0x7072, 0x708e, 0x70ac, 0x710b, 0x7132, 0x714a,
    0x7151, 0x7382, 0x780e, 0x7832, 0x784a, 0x7858, 0x788a, 0x788c,
    0x78c4, 0x78c8, 0x78e0, 0x7a0a, 0x7a0c, 0x7a12, 0x7a14, 0x7a18,
    0x7a44, 0x7a48, 0x7a50, 0x7a84, 0x7a88, 0x7ac0, 0x7e08, 0x7e40,
)

CODEBOOKS = {11: CODEBOOK_11, 16: CODEBOOK_16}
