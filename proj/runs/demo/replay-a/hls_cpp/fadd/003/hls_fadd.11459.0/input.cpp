void fadd(bool a, bool b, bool cin, bool *sum, bool *cout) {
#pragma HLS INTERFACE ap_ctrl_none port=return
    *sum = a ^ b ^ cin;
    *cout = (a & b) | (a & cin) | (b & cin);
}
