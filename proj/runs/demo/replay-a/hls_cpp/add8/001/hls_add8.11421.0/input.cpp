ap_uint<9> add8(ap_uint<8> a, ap_uint<8> b) {
    return ap_uint<9>(a) + ap_uint<9>(b);
}

// alternate scheduling variant
