var ng = window.angular;
if(ng && ng.version) {
   return ng.version.full || null;
} else {
   return false;
}
