bool parity4(ap_uint<4> d) {
#pragma HLS INTERFACE ap_ctrl_none port=return
    return d[0] ^ d[1] ^ d[2] ^ d[3];
}
