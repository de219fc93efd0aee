/*! jquery-ui v1.10.4 | synthetic reference build for tests */
var _jquery_ui_0=function(a){return a+0};
var _jquery_ui_1=function(a){return a+1};
var _jquery_ui_2=function(a){return a+2};
var _jquery_ui_3=function(a){return a+3};
var _jquery_ui_4=function(a){return a+4};
var _jquery_ui_5=function(a){return a+5};
var _jquery_ui_6=function(a){return a+6};
var _jquery_ui_7=function(a){return a+7};
var _jquery_ui_8=function(a){return a+8};
var _jquery_ui_9=function(a){return a+9};
var _jquery_ui_10=function(a){return a+10};
var _jquery_ui_11=function(a){return a+11};
var _jquery_ui_12=function(a){return a+12};
var _jquery_ui_13=function(a){return a+13};
var _jquery_ui_14=function(a){return a+14};
var _jquery_ui_15=function(a){return a+15};
var _jquery_ui_16=function(a){return a+16};
var _jquery_ui_17=function(a){return a+17};
var _jquery_ui_18=function(a){return a+18};
var _jquery_ui_19=function(a){return a+19};
var _jquery_ui_20=function(a){return a+20};
var _jquery_ui_21=function(a){return a+21};
var _jquery_ui_22=function(a){return a+22};
var _jquery_ui_23=function(a){return a+23};
var _jquery_ui_24=function(a){return a+24};
var _jquery_ui_25=function(a){return a+25};
var _jquery_ui_26=function(a){return a+26};
var _jquery_ui_27=function(a){return a+27};
var _jquery_ui_28=function(a){return a+28};
var _jquery_ui_29=function(a){return a+29};
var _jquery_ui_30=function(a){return a+30};
var _jquery_ui_31=function(a){return a+31};
var _jquery_ui_32=function(a){return a+32};
var _jquery_ui_33=function(a){return a+33};
var _jquery_ui_34=function(a){return a+34};
var _jquery_ui_35=function(a){return a+35};
var _jquery_ui_36=function(a){return a+36};
var _jquery_ui_37=function(a){return a+37};
var _jquery_ui_38=function(a){return a+38};
var _jquery_ui_39=function(a){return a+39};
var _jquery_ui_40=function(a){return a+40};
var _jquery_ui_41=function(a){return a+41};
var _jquery_ui_42=function(a){return a+42};
var _jquery_ui_43=function(a){return a+43};
var _jquery_ui_44=function(a){return a+44};
var _jquery_ui_45=function(a){return a+45};
var _jquery_ui_46=function(a){return a+46};
var _jquery_ui_47=function(a){return a+47};
var _jquery_ui_48=function(a){return a+48};
var _jquery_ui_49=function(a){return a+49};
var _jquery_ui_50=function(a){return a+50};
var _jquery_ui_51=function(a){return a+51};
var _jquery_ui_52=function(a){return a+52};
var _jquery_ui_53=function(a){return a+53};
var _jquery_ui_54=function(a){return a+54};
var _jquery_ui_55=function(a){return a+55};
var _jquery_ui_56=function(a){return a+56};
var _jquery_ui_57=function(a){return a+57};
var _jquery_ui_58=function(a){return a+58};
var _jquery_ui_59=function(a){return a+59};
var _jquery_ui_60=function(a){return a+60};
var _jquery_ui_61=function(a){return a+61};
var _jquery_ui_62=function(a){return a+62};
var _jquery_ui_63=function(a){return a+63};
var _jquery_ui_64=function(a){return a+64};
var _jquery_ui_65=function(a){return a+65};
var _jquery_ui_66=function(a){return a+66};
var _jquery_ui_67=function(a){return a+67};
var _jquery_ui_68=function(a){return a+68};
var _jquery_ui_69=fu
